#pragma once

// Invariant-measure estimation by time averaging, occupation-tail
// diagnostics and the two-start ergodicity comparison.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <tuple>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sks/dynamics.hpp"
#include "sks/field.hpp"
#include "sks/spectral.hpp"

namespace sks {

struct Observable {
    std::string name;
    std::function<double(const SpectralField&, const WavenumberTable&)> eval;
};

inline Observable obs_h_energy() {
    return {"H_energy", [](const SpectralField& u, const WavenumberTable&) {
                const double n = u.norm_h();
                return n * n;
            }};
}

inline Observable obs_sobolev_energy(double alpha) {
    return {"A" + std::to_string(alpha) + "_energy",
            [alpha](const SpectralField& u, const WavenumberTable& tab) {
                const double n = sobolev_norm(u, alpha, tab);
                return n * n;
            }};
}

inline Observable obs_mode_energy(int j) {
    return {"mode_" + std::to_string(j) + "_energy",
            [j](const SpectralField& u, const WavenumberTable&) { return u.coeff(j) * u.coeff(j); }};
}

inline Observable obs_point_value(double x, double L) {
    return {"u(" + std::to_string(x) + ")",
            [x, L](const SpectralField& u, const WavenumberTable&) { return u.evaluate(x, L); }};
}

// Streaming time averages over [burn_in, T] with batch-means standard
// errors, plus occupation counters per registered (alpha, R) pair.
class MomentAccumulator {
  public:
    MomentAccumulator(std::vector<Observable> observables, double burn_in, double T_planned,
                      int n_batches = 32)
        : observables_(std::move(observables)), burn_in_(burn_in), t_planned_(T_planned) {
        if (!(T_planned > burn_in))
            throw std::invalid_argument("MomentAccumulator: T must exceed burn_in");
        batch_len_ = (T_planned - burn_in) / n_batches;
        integral_.assign(observables_.size(), 0.0);
        batch_sum_.assign(observables_.size(), 0.0);
        batches_.assign(observables_.size(), {});
    }

    void register_occupation(double alpha, double R) { occupation_[{alpha, R}] = 0.0; }

    // State held over [t, t + dt] (left-endpoint occupation quadrature).
    void add(double t, double dt, const SpectralField& u, const WavenumberTable& tab) {
        if (t < burn_in_) return;
        for (std::size_t i = 0; i < observables_.size(); ++i) {
            const double v = observables_[i].eval(u, tab) * dt;
            integral_[i] += v;
            batch_sum_[i] += v;
        }
        for (auto& [key, time_above] : occupation_) {
            if (sobolev_norm(u, key.first, tab) > key.second) time_above += dt;
        }
        t_elapsed_ += dt;
        ++n_records_;
        if (!batches_.empty() &&
            t_elapsed_ >= batch_len_ * static_cast<double>(batches_[0].size() + 1)) {
            for (std::size_t i = 0; i < observables_.size(); ++i) {
                batches_[i].push_back(batch_sum_[i] / batch_len_);
                batch_sum_[i] = 0.0;
            }
        }
    }

    double elapsed() const { return t_elapsed_; }
    std::uint64_t records() const { return n_records_; }
    double burn_in() const { return burn_in_; }
    const std::vector<Observable>& observables() const { return observables_; }

    double average(std::size_t i) const {
        if (t_elapsed_ <= 0.0) throw std::invalid_argument("MomentAccumulator: no samples");
        return integral_.at(i) / t_elapsed_;
    }

    // Batch-means standard error; conservative for correlated records.
    double stderr_estimate(std::size_t i) const {
        const auto& b = batches_.at(i);
        if (b.size() < 2) return std::numeric_limits<double>::quiet_NaN();
        double mean = 0.0;
        for (double v : b) mean += v;
        mean /= static_cast<double>(b.size());
        double var = 0.0;
        for (double v : b) var += (v - mean) * (v - mean);
        var /= static_cast<double>(b.size() - 1);
        return std::sqrt(var / static_cast<double>(b.size()));
    }

    double occupation_fraction(double alpha, double R) const {
        const auto it = occupation_.find({alpha, R});
        if (it == occupation_.end())
            throw std::invalid_argument("occupation_tail: unregistered (alpha, R) pair");
        if (t_elapsed_ <= 0.0) return 0.0;
        return it->second / t_elapsed_;
    }

  private:
    std::vector<Observable> observables_;
    double burn_in_;
    double t_planned_;
    double batch_len_;
    double t_elapsed_ = 0.0;
    std::uint64_t n_records_ = 0;
    std::vector<double> integral_;
    std::vector<double> batch_sum_;
    std::vector<std::vector<double>> batches_;
    std::map<std::pair<double, double>, double> occupation_;
};

struct AverageEntry {
    std::string name;
    double average;
    double stderr_estimate;
    std::uint64_t n_records;
};

struct KBResult {
    double T;
    double burn_in;
    std::vector<AverageEntry> entries;
    std::vector<std::tuple<double, double, double>> occupation;  // alpha, R, fraction
};

// Advance a trajectory with the configured scheme, feeding every step into
// the accumulator; also invokes `record` (when set) at record_stride.
inline void run_accumulate(const Integrator& integ, const SpectralField& y, std::uint64_t trajectory,
                           const CounterRng& rng, MomentAccumulator& acc,
                           const std::function<void(double, const SpectralField&)>& record = {},
                           EnergyMonitor* monitor = nullptr) {
    const SimConfig& cfg = integ.config();
    RngStream stream(rng, trajectory);
    const std::uint64_t n = cfg.steps();
    if (cfg.scheme == Scheme::v_plus_z) {
        SpectralField v = y, z(cfg.K);
        for (std::uint64_t i = 0; i < n; ++i) {
            const SpectralField v_before = v, z_before = z;
            integ.step_v_plus_z(v, z, stream, i);
            if (monitor) monitor->observe(integ, v_before, v, z_before, i);
            const SpectralField u = v + z;
            const double t = static_cast<double>(i + 1) * cfg.dt;
            acc.add(t, cfg.dt, u, integ.table());
            if (record && ((i + 1) % static_cast<std::uint64_t>(cfg.record_stride) == 0)) record(t, u);
        }
    } else {
        SpectralField u = y;
        const double R = integ.config().cutoff_R;
        for (std::uint64_t i = 0; i < n; ++i) {
            u = (R > 0.0) ? integ.cutoff_step(u, stream, i, R) : integ.step_u(u, stream, i);
            const double t = static_cast<double>(i + 1) * cfg.dt;
            acc.add(t, cfg.dt, u, integ.table());
            if (record && ((i + 1) % static_cast<std::uint64_t>(cfg.record_stride) == 0)) record(t, u);
        }
    }
}

// Krylov-Bogoliubov time averages over [burn_in, T] for one trajectory.
inline KBResult kb_average(const Integrator& integ, const SpectralField& y, std::uint64_t trajectory,
                           const CounterRng& rng, const std::vector<Observable>& observables,
                           double burn_in,
                           const std::vector<std::pair<double, double>>& occupation_pairs = {}) {
    if (!(integ.config().T > burn_in)) throw std::invalid_argument("kb_average: T must exceed burn_in");
    MomentAccumulator acc(observables, burn_in, integ.config().T);
    for (const auto& [alpha, R] : occupation_pairs) acc.register_occupation(alpha, R);
    run_accumulate(integ, y, trajectory, rng, acc);
    KBResult res;
    res.T = integ.config().T;
    res.burn_in = burn_in;
    for (std::size_t i = 0; i < observables.size(); ++i)
        res.entries.push_back({observables[i].name, acc.average(i), acc.stderr_estimate(i), acc.records()});
    for (const auto& [alpha, R] : occupation_pairs)
        res.occupation.emplace_back(alpha, R, acc.occupation_fraction(alpha, R));
    return res;
}

struct ErgodicCompareEntry {
    std::string name;
    double average_1, stderr_1;
    double average_2, stderr_2;
    double rel_discrepancy;
    bool pass;
};

struct ErgodicCompareReport {
    std::vector<ErgodicCompareEntry> entries;
    bool all_pass = true;
};

// Long-run averages from two starts with independent streams; the invariant
// measure is unique, so the averages must agree up to sampling error.
inline ErgodicCompareReport ergodic_compare(const Integrator& integ, const SpectralField& y1,
                                            const SpectralField& y2, const CounterRng& rng,
                                            const std::vector<Observable>& observables,
                                            double burn_in, double tolerance) {
    const KBResult r1 = kb_average(integ, y1, 0, rng, observables, burn_in);
    const KBResult r2 = kb_average(integ, y2, 1, rng, observables, burn_in);
    ErgodicCompareReport rep;
    for (std::size_t i = 0; i < observables.size(); ++i) {
        ErgodicCompareEntry e;
        e.name = observables[i].name;
        e.average_1 = r1.entries[i].average;
        e.stderr_1 = r1.entries[i].stderr_estimate;
        e.average_2 = r2.entries[i].average;
        e.stderr_2 = r2.entries[i].stderr_estimate;
        const double scale = 0.5 * (std::abs(e.average_1) + std::abs(e.average_2));
        e.rel_discrepancy = (scale > 0.0) ? std::abs(e.average_1 - e.average_2) / scale : 0.0;
        e.pass = e.rel_discrepancy <= tolerance;
        rep.all_pass = rep.all_pass && e.pass;
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace sks
