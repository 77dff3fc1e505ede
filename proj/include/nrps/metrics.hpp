// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nrps/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nrps
{

inline constexpr double kLost = std::numeric_limits<double>::infinity();

struct Sample
{
    std::uint32_t replication_id = 0;
    std::uint32_t ue_id = 0;
    double value_ms = 0.0; // +inf for undelivered payloads
};

/// Append-only until sealed at replication end.
class SampleSeries
{
  public:
    SampleSeries() = default;
    SampleSeries(std::string name, std::string unit) : name_(std::move(name)), unit_(std::move(unit)) {}

    const std::string& name() const noexcept { return name_; }
    const std::string& unit() const noexcept { return unit_; }
    const std::vector<Sample>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool sealed() const noexcept { return sealed_; }

    void add(std::uint32_t replication, std::uint32_t ue, double value_ms)
    {
        if (sealed_)
        {
            throw std::logic_error("SampleSeries '" + name_ + "' is sealed");
        }
        samples_.push_back(Sample{replication, ue, value_ms});
    }

    void seal() noexcept { sealed_ = true; }

    /// Concatenates another sealed series; callers merge in replication order.
    void append(const SampleSeries& other)
    {
        if (sealed_)
        {
            throw std::logic_error("SampleSeries '" + name_ + "' is sealed");
        }
        samples_.insert(samples_.end(), other.samples_.begin(), other.samples_.end());
    }

    std::vector<double> values() const
    {
        std::vector<double> v;
        v.reserve(samples_.size());
        for (const auto& s : samples_)
        {
            v.push_back(s.value_ms);
        }
        return v;
    }

  private:
    std::string name_;
    std::string unit_ = "ms";
    std::vector<Sample> samples_;
    bool sealed_ = false;
};

struct CcdfPoint
{
    double x = 0.0;
    double exceedance = 0.0; // P(X > x)
};

/// Step CCDF over the sorted unique values. Empty input gives empty output.
inline std::vector<CcdfPoint> ccdf(std::span<const double> values)
{
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    std::vector<CcdfPoint> out;
    const double n = static_cast<double>(v.size());
    std::size_t i = 0;
    while (i < v.size())
    {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i])
        {
            ++j;
        }
        out.push_back(CcdfPoint{v[i], static_cast<double>(v.size() - j) / n});
        i = j;
    }
    return out;
}

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054)
{
    if (trials == 0)
    {
        return Interval{0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return Interval{lo, hi};
}

struct OutageReport
{
    std::string series_name;
    double outage_probability = 0.0;
    double outage_value = 0.0;
    std::size_t sample_count = 0;
    double exceedance = 0.0; // empirical P(X > outage_value)
    Interval wilson_ci;
    bool low_confidence = false;
};

/// Smallest sample x with empirical P(X > x) <= p. Lost payloads are +inf samples,
/// so a reliability shortfall beyond p yields an unbounded outage value.
inline OutageReport outage_latency(std::span<const double> values, double p, std::string name = {})
{
    if (!(p > 0.0 && p < 1.0))
    {
        throw std::invalid_argument("outage_latency: p must lie in (0, 1)");
    }
    OutageReport r;
    r.series_name = std::move(name);
    r.outage_probability = p;
    r.sample_count = values.size();
    r.low_confidence = static_cast<double>(values.size()) * p < 10.0;
    if (values.empty())
    {
        r.outage_value = std::numeric_limits<double>::quiet_NaN();
        r.low_confidence = true;
        return r;
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    // Largest exceedance count allowed: floor(p n), guarded against representation error.
    const auto allowed = static_cast<std::size_t>(std::floor(p * static_cast<double>(n) + 1e-9));
    // x = v[k] has exceedance count n - upper_bound(v[k]); the smallest qualifying x is v[n-1-allowed]
    // when no ties straddle the cut, and ties only lower the count further.
    const std::size_t k = allowed >= n ? 0 : n - 1 - allowed;
    r.outage_value = v[k];
    const auto above = static_cast<std::size_t>(v.end() - std::upper_bound(v.begin(), v.end(), r.outage_value));
    r.exceedance = static_cast<double>(above) / static_cast<double>(n);
    r.wilson_ci = wilson_interval(above, n);
    return r;
}

inline double mean_finite(std::span<const double> values)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : values)
    {
        if (std::isfinite(v))
        {
            sum += v;
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

inline double median(std::span<const double> values)
{
    if (values.empty())
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct AuditResult
{
    bool pass = true;
    std::size_t delivered = 0;
    std::size_t lost = 0;
    std::size_t in_queue = 0;
    std::vector<std::uint64_t> unaccounted;
    std::vector<std::uint64_t> double_counted;
};

/// Every packet must be exactly one of delivered, lost by HARQ exhaustion, or still queued.
/// `queued_ids` lists packets the cell still holds at the horizon.
inline AuditResult conservation_audit(std::span<const Packet> packets, std::span<const std::uint64_t> queued_ids,
                                      SimTime horizon)
{
    AuditResult r;
    std::vector<std::uint64_t> queued(queued_ids.begin(), queued_ids.end());
    std::sort(queued.begin(), queued.end());
    for (const auto& p : packets)
    {
        const bool delivered = p.delivered.has_value() && *p.delivered <= horizon;
        const bool in_queue = std::binary_search(queued.begin(), queued.end(), p.id);
        const int states = int(delivered) + int(p.lost) + int(in_queue);
        if (delivered && *p.delivered < p.arrival)
        {
            r.unaccounted.push_back(p.id);
            continue;
        }
        if (states == 0)
        {
            r.unaccounted.push_back(p.id);
        }
        else if (states > 1)
        {
            r.double_counted.push_back(p.id);
        }
        else
        {
            r.delivered += delivered;
            r.lost += p.lost;
            r.in_queue += in_queue;
        }
    }
    r.pass = r.unaccounted.empty() && r.double_counted.empty() &&
             r.delivered + r.lost + r.in_queue == packets.size();
    return r;
}

} // namespace nrps
