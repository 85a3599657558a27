#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace aquaswipt
{
//! Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

//! Invalid configuration; carries every offending field path.
class ConfigError : public std::invalid_argument
{
  public:
    explicit ConfigError(std::vector<std::string> fields)
        : std::invalid_argument(join(fields)), fields_(std::move(fields))
    {
    }

    const std::vector<std::string>& fields() const { return fields_; }

  private:
    static std::string join(const std::vector<std::string>& fields)
    {
        std::string msg = "invalid configuration:";
        for (const auto& f : fields)
        {
            msg += "\n  ";
            msg += f;
        }
        return msg;
    }

    std::vector<std::string> fields_;
};

//! Operation not permitted in the object's current state.
class StateError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

//! Filesystem failure; keeps the offending path.
class IoError : public std::runtime_error
{
  public:
    IoError(std::filesystem::path path, const std::string& what)
        : std::runtime_error(what + ": " + path.string()), path_(std::move(path))
    {
    }

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

//! Iterative method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace aquaswipt
