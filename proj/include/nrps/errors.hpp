// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nrps
{

/// A configuration value violates one of its module's invariants.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key))
    {
    }

    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

inline void require(bool condition, const char* key, const std::string& what)
{
    if (!condition)
    {
        throw ConfigError(key, what);
    }
}

} // namespace nrps
