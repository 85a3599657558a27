#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Core>

#include "errors.hpp"

namespace aquaswipt
{
//---------------------------------------------------------------------------//
// TYPES
//---------------------------------------------------------------------------//

enum class NoiseKind
{
    composite,          //!< Sum of turbulence, shipping, wind and thermal PSDs
    constant_override,  //!< Fixed in-band noise level, bypasses the PSD model
};

template<class Scalar>
struct BasicNoiseModel
{
    NoiseKind kind = NoiseKind::composite;
    Scalar nl_db = -50;  //!< Used only for constant_override

    static BasicNoiseModel constant(Scalar nl) { return {NoiseKind::constant_override, nl}; }
};

//! Link-budget parameters shared by every acoustic link in a deployment.
template<class Scalar>
struct BasicChannelParams
{
    Scalar frequency_khz = 24;
    Scalar bandwidth_hz = 4000;
    Scalar spreading_factor_k = 1.5;
    Scalar wind_speed_w = 10;
    Scalar shipping_factor_s = 0;
    BasicNoiseModel<Scalar> noise_model{};
    Scalar sound_speed_c = 1500;

    bool valid() const
    {
        return frequency_khz > 0 && bandwidth_hz > 0 && spreading_factor_k >= 1
               && spreading_factor_k <= 2 && wind_speed_w >= 0 && shipping_factor_s >= 0
               && shipping_factor_s <= 1 && sound_speed_c > 0;
    }
};

//! Acoustic modem: electrical drive, conversion efficiency, directivity.
template<class Scalar>
struct BasicModemSpec
{
    Scalar electrical_power_w = 1;
    Scalar ea_efficiency = 1;
    Scalar directivity_index_db = 0;
    std::optional<Scalar> source_level_db{};
    Scalar min_snr_db = 0;

    bool valid() const
    {
        return electrical_power_w > 0 && ea_efficiency > 0 && ea_efficiency <= 1;
    }
};

template<class Scalar>
struct BasicNoisePsd
{
    Scalar turbulence;
    Scalar shipping;
    Scalar wind;
    Scalar thermal;
    Scalar total_db;
};

using NoiseModel = BasicNoiseModel<double>;
using ChannelParams = BasicChannelParams<double>;
using ModemSpec = BasicModemSpec<double>;
using NoisePsd = BasicNoisePsd<double>;

//---------------------------------------------------------------------------//
// FREE FUNCTIONS
//---------------------------------------------------------------------------//

//! Thorp seawater absorption [dB/km], frequency in kHz.
template<class Scalar>
Scalar thorp_absorption(Scalar f)
{
    if (!(f > 0))
    {
        throw DomainError("thorp_absorption: frequency must be positive");
    }
    Scalar const f2 = f * f;
    return Scalar(0.11) * f2 / (1 + f2) + Scalar(44) * f2 / (4100 + f2)
           + Scalar(2.75e-4) * f2 + Scalar(0.003);
}

//! Source level [dB re 1 uPa @ 1 m] from electrical drive, or the override.
template<class Scalar>
Scalar source_level(BasicModemSpec<Scalar> const& modem)
{
    if (modem.source_level_db)
    {
        return *modem.source_level_db;
    }
    using std::log10;
    return Scalar(170.8) + 10 * log10(modem.electrical_power_w)
           + 10 * log10(modem.ea_efficiency) + modem.directivity_index_db;
}

//! Spreading plus absorption loss [dB]; range in metres, >= 1 m reference.
template<class Scalar>
Scalar transmission_loss_db(Scalar range_m, BasicChannelParams<Scalar> const& params)
{
    if (!(range_m >= 1))
    {
        throw DomainError("transmission_loss_db: range below the 1 m reference");
    }
    using std::log10;
    return params.spreading_factor_k * 10 * log10(range_m)
           + (range_m / 1000) * thorp_absorption(params.frequency_khz);
}

//! Vectorised transmission loss over an array of ranges (each >= 1 m).
template<class Derived>
auto transmission_loss_db(Eigen::ArrayBase<Derived> const& range_m,
                          BasicChannelParams<typename Derived::Scalar> const& params)
{
    using Scalar = typename Derived::Scalar;
    if (range_m.size() > 0 && !(range_m.minCoeff() >= Scalar(1)))
    {
        throw DomainError("transmission_loss_db: range below the 1 m reference");
    }
    Scalar const alpha = thorp_absorption(params.frequency_khz);
    return (params.spreading_factor_k * Scalar(10) * range_m.log10() + range_m * (alpha / 1000))
        .eval();
}

//! Ambient noise power spectral densities [dB re 1 uPa per Hz].
template<class Scalar>
BasicNoisePsd<Scalar> noise_psd_db(Scalar f, BasicChannelParams<Scalar> const& params)
{
    if (!(f > 0))
    {
        throw DomainError("noise_psd_db: frequency must be positive");
    }
    using std::log10;
    using std::pow;
    using std::sqrt;
    BasicNoisePsd<Scalar> n;
    n.turbulence = 17 - 30 * log10(f);
    n.shipping = 30 + 20 * params.shipping_factor_s + 26 * log10(f)
                 - 60 * log10(f + Scalar(0.03));
    n.wind = 50 + Scalar(7.5) * sqrt(params.wind_speed_w) + 20 * log10(f)
             - 40 * log10(f + Scalar(0.4));
    n.thermal = -15 + 20 * log10(f);
    auto lin = [](Scalar db) { return pow(Scalar(10), db / 10); };
    n.total_db = 10
                 * log10(lin(n.turbulence) + lin(n.shipping) + lin(n.wind)
                         + lin(n.thermal));
    return n;
}

//! In-band noise level NL [dB]: PSD integrated over the bandwidth.
template<class Scalar>
Scalar noise_level_db(BasicChannelParams<Scalar> const& params)
{
    if (params.noise_model.kind == NoiseKind::constant_override)
    {
        return params.noise_model.nl_db;
    }
    using std::log10;
    return noise_psd_db(params.frequency_khz, params).total_db
           + 10 * log10(params.bandwidth_hz);
}

//! Passive sonar equation.
template<class Scalar>
constexpr Scalar sonar_snr_db(Scalar sl, Scalar tl, Scalar nl, Scalar di)
{
    return sl - tl - nl + di;
}

template<class Scalar>
Scalar received_snr_db(BasicModemSpec<Scalar> const& source,
                       Scalar range_m,
                       BasicChannelParams<Scalar> const& params)
{
    return sonar_snr_db(source_level(source),
                        transmission_loss_db(range_m, params),
                        noise_level_db(params),
                        source.directivity_index_db);
}

//! Shannon rate [bit/s], zero in outage (snr below threshold).
template<class Scalar>
Scalar shannon_throughput_bps(Scalar snr_db,
                              BasicChannelParams<Scalar> const& params,
                              Scalar min_snr_db)
{
    if (!(snr_db >= min_snr_db))
    {
        return 0;
    }
    using std::log2;
    using std::pow;
    return params.bandwidth_hz * log2(1 + pow(Scalar(10), snr_db / 10));
}

}  // namespace aquaswipt
