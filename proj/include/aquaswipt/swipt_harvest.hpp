#pragma once

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace aquaswipt
{
//---------------------------------------------------------------------------//
/*!
 * Receiver-side harvesting chain of a sensor node.
 *
 * The hydrophone sensitivity is held both in dB (rho) and linear V/uPa (M);
 * construct through \c from_sensitivity_db or \c from_sensitivity_linear so
 * the two stay consistent.
 */
template<class Scalar>
struct BasicHarvestSpec
{
    Scalar sensitivity_rho_db = -160;
    Scalar sensitivity_m = Scalar(1e-8);
    Scalar load_resistance_ohm = 25;
    int array_elements_n = 1;
    Scalar ae_efficiency = Scalar(0.5);
    //! Fraction of received power routed to information decoding
    Scalar split_ratio = Scalar(0.5);

    static BasicHarvestSpec from_sensitivity_db(Scalar rho_db)
    {
        using std::pow;
        BasicHarvestSpec s;
        s.sensitivity_rho_db = rho_db;
        s.sensitivity_m = pow(Scalar(10), rho_db / 20);
        return s;
    }

    static BasicHarvestSpec from_sensitivity_linear(Scalar m)
    {
        using std::log10;
        BasicHarvestSpec s;
        s.sensitivity_m = m;
        s.sensitivity_rho_db = 20 * log10(m);
        return s;
    }

    bool valid() const
    {
        return sensitivity_m > 0 && load_resistance_ohm > 0 && array_elements_n > 0
               && ae_efficiency > 0 && ae_efficiency <= 1 && split_ratio >= 0
               && split_ratio <= 1;
    }
};

//! Bounded charge reservoir (node supercapacitor bank or AUV battery).
template<class Scalar>
struct BasicEnergyStore
{
    Scalar capacity_j = 100;
    Scalar level_j = 50;
    Scalar charge_efficiency = 1;

    bool valid() const
    {
        return capacity_j > 0 && level_j >= 0 && level_j <= capacity_j
               && charge_efficiency > 0 && charge_efficiency <= 1;
    }
    bool full() const { return !(level_j < capacity_j); }
    Scalar headroom() const { return capacity_j - level_j; }
};

template<class Scalar>
struct BasicPowerSplit
{
    Scalar info_w;
    Scalar harvest_w;
};

template<class Scalar>
struct BasicChargeResult
{
    BasicEnergyStore<Scalar> store;
    Scalar accepted_j;
};

using HarvestSpec = BasicHarvestSpec<double>;
using EnergyStore = BasicEnergyStore<double>;
using PowerSplit = BasicPowerSplit<double>;
using ChargeResult = BasicChargeResult<double>;

//---------------------------------------------------------------------------//

//! Open-circuit voltage at the hydrophone terminals [V].
template<class Scalar>
Scalar induced_voltage(Scalar snr_db, BasicHarvestSpec<Scalar> const& spec)
{
    using std::pow;
    return pow(Scalar(10), snr_db / 20) * pow(Scalar(10), spec.sensitivity_rho_db / 20);
}

//! Matched-load power available after acousto-electric conversion [W].
template<class Scalar>
Scalar harvestable_power(Scalar snr_db, BasicHarvestSpec<Scalar> const& spec)
{
    using std::pow;
    return spec.array_elements_n * spec.ae_efficiency
           * pow(Scalar(10), (snr_db + spec.sensitivity_rho_db) / 10)
           / (4 * spec.load_resistance_ohm);
}

//! Power-splitting receiver: info gets split_ratio, harvesting the rest.
template<class Scalar>
BasicPowerSplit<Scalar> split_power(Scalar received_power_w, Scalar split_ratio)
{
    Scalar const info = split_ratio * received_power_w;
    return {info, received_power_w - info};
}

template<class Scalar>
BasicChargeResult<Scalar>
charge(BasicEnergyStore<Scalar> store, Scalar harvest_w, Scalar duration_s)
{
    Scalar const offered = harvest_w * duration_s * store.charge_efficiency;
    Scalar const accepted = std::clamp(offered, Scalar(0), store.headroom());
    store.level_j = std::min(store.capacity_j, store.level_j + accepted);
    return {store, accepted};
}

}  // namespace aquaswipt
