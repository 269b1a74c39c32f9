// Command-line front end for the stochastic Kuramoto-Sivashinsky engine.
//
// Subcommands: check, simulate, invariant, mixing, gradient, control.
// Exit codes: 0 success, 1 tolerance failure, 2 config error, 3 blow-up,
// 4 admissibility failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sks/config.hpp"
#include "sks/control.hpp"
#include "sks/dynamics.hpp"
#include "sks/ergodic.hpp"
#include "sks/field.hpp"
#include "sks/gradient.hpp"
#include "sks/io.hpp"
#include "sks/noise.hpp"
#include "sks/spectral.hpp"
#include "sks/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;
constexpr int kExitAdmissibility = 4;

// Deterministic unit-norm pseudo-random field derived from the master seed.
sks::SpectralField random_unit_field(int K, std::uint64_t seed, std::uint64_t salt) {
    sks::CounterRng rng(seed);
    sks::SpectralField f(K);
    for (int j = 1; j <= 2 * K; ++j)
        f.coeff(j) = rng.normal({0xFFFFFFFFFFFF0000ull + salt, 0, static_cast<std::uint32_t>(j), 0});
    const double n = f.norm_h();
    if (n > 0.0) f *= 1.0 / n;
    return f;
}

sks::SpectralField initial_field(const std::string& spec_str, const sks::RunConfig& cfg,
                                 std::uint64_t salt) {
    if (spec_str == "zero" || spec_str.empty()) return sks::SpectralField(cfg.K);
    if (spec_str == "random") return random_unit_field(cfg.K, cfg.seed, salt);
    std::ifstream in(spec_str);
    if (!in) throw sks::ConfigError("cannot open initial-condition snapshot: " + spec_str);
    const sks::Snapshot snap = sks::read_snapshot(in);
    if (snap.field.pairs() != cfg.K)
        throw sks::ConfigError("initial-condition snapshot resolution mismatch");
    return snap.field;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw sks::ConfigError("cannot open output file: " + path);
    return out;
}

struct CommonArgs {
    std::string config_path;
    std::string out_path = "-";
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key = value configuration file");
    cmd->add_option("--out", args.out_path, "output path ('-' for stdout)");
    const auto track = [&args, cmd](const std::string& flag, const std::string& key,
                                    const std::string& help) {
        auto* opt = cmd->add_option(flag);
        opt->description(help);
        opt->each([&args, key](const std::string& v) { args.overrides.emplace_back(key, v); });
    };
    track("--nu", "nu", "viscosity");
    track("--L", "L", "spatial period");
    track("--gamma", "gamma", "noise amplitude exponent (G = L A^gamma)");
    track("--shift-a", "shift_a", "stabilization shift a (> 1/(4 nu) for OU)");
    cmd->add_flag_callback(
        "--shift-iso", [&args]() { args.overrides.emplace_back("shift_iso", "1"); },
        "enable the pairwise shift isomorphism in G");
    cmd->add_flag_callback(
        "--uso-profile", [&args]() { args.overrides.emplace_back("uso_profile", "1"); },
        "use the non-admissible sqrt(lambda(1+lambda)) amplitudes");
    track("--modes", "K", "spectral pair count K");
    track("--dt", "dt", "time step");
    track("--T", "T", "horizon");
    track("--burn-in", "burn_in", "time excluded from averages");
    track("--cutoff-R", "cutoff_R", "cutoff radius (0 disables)");
    track("--seed", "seed", "master RNG seed");
    track("--record-stride", "record_stride", "steps per trajectory record");
    track("--modes-out", "modes_out", "mode columns in trajectory CSV");
    track("--scheme", "scheme", "direct-u or v-plus-z");
    track("--alpha", "alpha", "spectral weight for diagnostics");
    track("--mix-tolerance", "mix_tolerance", "relative tolerance for the mixing report");
    track("--samples", "samples", "Monte-Carlo sample count");
    track("--direction-mode", "direction_mode", "gradient direction h = e_j");
    track("--phi-mode", "phi_mode", "gradient observable phi = <u, e_j>");
    track("--threads", "threads", "worker threads for trajectory fan-out");
}

sks::RunConfig resolve(const CommonArgs& args) {
    std::string contents;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw sks::ConfigError("cannot open config file: " + args.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        contents = ss.str();
    }
    return sks::parse_config(contents, args.overrides);
}

class OutputTarget {
  public:
    explicit OutputTarget(const std::string& path) {
        if (path != "-") file_ = open_out(path);
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

int cmd_check(const sks::RunConfig& cfg, const std::string& out_path) {
    OutputTarget target(out_path);
    std::ostream& os = target.stream();
    cfg.echo(os);
    const sks::WavenumberTable tab(cfg.K, cfg.L);
    const sks::NoiseOperator g = cfg.noise(tab);

    const bool ipotG = g.admissible();
    os << "ipotG: " << (ipotG ? "true" : "false");
    if (g.is_power_law()) os << "  (power law, gamma = " << sks::format_g17(cfg.gamma) << ", rule gamma < 3/4)";
    else os << "  (amplitude profile sqrt(lambda (1 + lambda)): divergent weight sum)";
    os << "\n";
    os << "hs_partial_sum(alpha=0, n_pairs=" << cfg.K
       << "): " << sks::format_g17(g.hs_partial_sum(0.0, cfg.K, tab)) << "\n";

    if (g.is_power_law()) {
        os << "ipoalfa window: alpha < " << sks::format_g17(0.75 - cfg.gamma) << "\n";
        const sks::RegularityWindow w = sks::regularity_window(cfg.gamma);
        if (w.applies)
            os << "regularity window: " << sks::format_g17(w.alpha_min)
               << " <= alpha < " << sks::format_g17(w.alpha_max) << "\n";
        else
            os << "regularity window: state space H (gamma >= -1)\n";
    }

    const sks::DomainSpec spec = cfg.domain();
    os << "shift stabilizes (a > 1/(4 nu)): " << (spec.shift_stabilizes() ? "true" : "false") << "\n";
    return ipotG ? kExitOk : kExitAdmissibility;
}

int cmd_simulate(const sks::RunConfig& cfg, const std::string& out_path, const std::string& y0) {
    const sks::WavenumberTable tab(cfg.K, cfg.L);
    const sks::NoiseOperator g = cfg.noise(tab);
    if (!g.admissible())
        std::cerr << "warning: noise operator fails the Hilbert-Schmidt admissibility condition\n";
    const sks::Integrator integ(cfg.domain(), g, cfg.sim());
    const sks::CounterRng rng(cfg.seed);
    const sks::SpectralField y = initial_field(y0, cfg, 1);

    OutputTarget target(out_path);
    std::ostream& os = target.stream();
    cfg.echo(os);
    os << "t,H_norm,V_halfnorm,A_norm";
    for (int m = 1; m <= cfg.modes_out; ++m) os << ",mode_" << m;
    os << "\n";
    const auto emit = [&](double t, const sks::SpectralField& u) {
        os << sks::format_g17(t) << "," << sks::format_g17(u.norm_h()) << ","
           << sks::format_g17(sks::sobolev_norm(u, 0.5, tab)) << ","
           << sks::format_g17(sks::sobolev_norm(u, 1.0, tab));
        for (int m = 1; m <= cfg.modes_out; ++m) os << "," << sks::format_g17(u.coeff(m));
        os << "\n";
    };
    emit(0.0, y);
    sks::MomentAccumulator acc({}, 0.0, cfg.T + 1.0);
    sks::run_accumulate(integ, y, 0, rng, acc, emit);
    return kExitOk;
}

int cmd_invariant(const sks::RunConfig& cfg, const std::string& out_path, const std::string& y0,
                  const std::vector<std::string>& occupation_args) {
    const sks::WavenumberTable tab(cfg.K, cfg.L);
    const sks::NoiseOperator g = cfg.noise(tab);
    if (!g.admissible()) {
        std::cerr << "error: invariant-measure estimation requires an admissible noise operator\n";
        return kExitAdmissibility;
    }
    const sks::Integrator integ(cfg.domain(), g, cfg.sim());
    const sks::CounterRng rng(cfg.seed);
    const sks::SpectralField y = initial_field(y0, cfg, 1);

    std::vector<sks::Observable> obs = {sks::obs_h_energy(), sks::obs_sobolev_energy(0.5)};
    for (int j = 1; j <= std::min(cfg.modes_out, 2 * cfg.K); ++j) obs.push_back(sks::obs_mode_energy(j));

    std::vector<std::pair<double, double>> pairs;
    for (const std::string& s : occupation_args) {
        const auto comma = s.find(',');
        if (comma == std::string::npos)
            throw sks::ConfigError("--occupation expects alpha,R");
        pairs.emplace_back(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
    }

    const sks::KBResult res = sks::kb_average(integ, y, 0, rng, obs, cfg.burn_in, pairs);

    OutputTarget target(out_path);
    std::ostream& os = target.stream();
    cfg.echo(os);
    os << "observable,T,average,stderr,n_records\n";
    for (const auto& e : res.entries)
        os << e.name << "," << sks::format_g17(res.T) << "," << sks::format_g17(e.average) << ","
           << sks::format_g17(e.stderr_estimate) << "," << e.n_records << "\n";
    if (!res.occupation.empty()) {
        os << "alpha,R,fraction,T\n";
        for (const auto& [alpha, R, fraction] : res.occupation)
            os << sks::format_g17(alpha) << "," << sks::format_g17(R) << ","
               << sks::format_g17(fraction) << "," << sks::format_g17(res.T) << "\n";
    }
    return kExitOk;
}

int cmd_mixing(const sks::RunConfig& cfg, const std::string& out_path, const std::string& y0,
               const std::string& y2_spec) {
    const sks::WavenumberTable tab(cfg.K, cfg.L);
    const sks::NoiseOperator g = cfg.noise(tab);
    if (!g.admissible()) {
        std::cerr << "error: the mixing experiment requires an admissible noise operator\n";
        return kExitAdmissibility;
    }
    const sks::Integrator integ(cfg.domain(), g, cfg.sim());
    const sks::CounterRng rng(cfg.seed);
    const sks::SpectralField y1 = initial_field(y0, cfg, 1);
    const sks::SpectralField y2 = initial_field(y2_spec, cfg, 2);

    std::vector<sks::Observable> obs = {sks::obs_h_energy(), sks::obs_sobolev_energy(0.5)};

    sks::ErgodicCompareReport rep;
    if (cfg.threads > 1) {
        // the two starts are independent trajectories; run them concurrently
        sks::KBResult r1, r2;
        std::thread t1([&] { r1 = sks::kb_average(integ, y1, 0, rng, obs, cfg.burn_in); });
        r2 = sks::kb_average(integ, y2, 1, rng, obs, cfg.burn_in);
        t1.join();
        for (std::size_t i = 0; i < obs.size(); ++i) {
            sks::ErgodicCompareEntry e;
            e.name = obs[i].name;
            e.average_1 = r1.entries[i].average;
            e.stderr_1 = r1.entries[i].stderr_estimate;
            e.average_2 = r2.entries[i].average;
            e.stderr_2 = r2.entries[i].stderr_estimate;
            const double scale = 0.5 * (std::abs(e.average_1) + std::abs(e.average_2));
            e.rel_discrepancy = (scale > 0.0) ? std::abs(e.average_1 - e.average_2) / scale : 0.0;
            e.pass = e.rel_discrepancy <= cfg.mix_tolerance;
            rep.all_pass = rep.all_pass && e.pass;
            rep.entries.push_back(e);
        }
    } else {
        rep = sks::ergodic_compare(integ, y1, y2, rng, obs, cfg.burn_in, cfg.mix_tolerance);
    }

    OutputTarget target(out_path);
    std::ostream& os = target.stream();
    cfg.echo(os);
    os << "observable,average_start1,stderr_start1,average_start2,stderr_start2,rel_discrepancy,pass\n";
    for (const auto& e : rep.entries)
        os << e.name << "," << sks::format_g17(e.average_1) << "," << sks::format_g17(e.stderr_1)
           << "," << sks::format_g17(e.average_2) << "," << sks::format_g17(e.stderr_2) << ","
           << sks::format_g17(e.rel_discrepancy) << "," << (e.pass ? 1 : 0) << "\n";
    return rep.all_pass ? kExitOk : kExitTolerance;
}

int cmd_gradient(const sks::RunConfig& cfg, const std::string& out_path, const std::string& y0) {
    const sks::WavenumberTable tab(cfg.K, cfg.L);
    const sks::NoiseOperator g = cfg.noise(tab);
    if (!g.admissible()) {
        std::cerr << "error: the gradient estimator requires an admissible noise operator\n";
        return kExitAdmissibility;
    }
    if (!g.invertible_on_modes()) {
        std::cerr << "error: the gradient formula requires GG* invertible on the retained modes\n";
        return kExitAdmissibility;
    }
    const sks::Integrator integ(cfg.domain(), g, cfg.sim());
    const sks::CounterRng rng(cfg.seed);
    const sks::SpectralField y = initial_field(y0, cfg, 1);
    const sks::SpectralField h = sks::basis_field(cfg.K, cfg.direction_mode);
    const int phi_mode = cfg.phi_mode;
    const auto phi = [phi_mode](const sks::SpectralField& u) { return u.coeff(phi_mode); };
    const bool nonlinear = cfg.cutoff_R > 0.0;

    const sks::MonteCarloEstimate est =
        sks::bel_gradient(y, h, phi, integ, rng, cfg.samples, nonlinear, 0, cfg.threads);

    OutputTarget target(out_path);
    std::ostream& os = target.stream();
    cfg.echo(os);
    os << "estimate,stderr,n_samples,t,direction_mode,phi_mode,nonlinear\n";
    os << sks::format_g17(est.value) << "," << sks::format_g17(est.stderr_estimate) << ","
       << est.n_samples << "," << sks::format_g17(cfg.T) << "," << cfg.direction_mode << ","
       << cfg.phi_mode << "," << (nonlinear ? 1 : 0) << "\n";
    return kExitOk;
}

int cmd_control(const sks::RunConfig& cfg, const std::string& out_path, const std::string& y0,
                const std::string& target_spec, int refine) {
    const sks::WavenumberTable tab(cfg.K, cfg.L);
    const sks::NoiseOperator g = cfg.noise(tab);
    const sks::Integrator integ(cfg.domain(), g, cfg.sim());
    const sks::SpectralField y = initial_field(y0, cfg, 1);
    const sks::SpectralField u_target = initial_field(target_spec, cfg, 3);

    const sks::ControlReport rep = sks::synthesize_control(y, u_target, integ, refine);

    OutputTarget target(out_path);
    std::ostream& os = target.stream();
    cfg.echo(os);
    os << "# replay_endpoint_error=" << sks::format_g17(rep.endpoint_error)
       << " replay_endpoint_rel_error=" << sks::format_g17(rep.endpoint_rel_error) << "\n";
    os << "# z_bar snapshot at t = T follows\n";
    sks::write_snapshot(os, rep.z_bar.back(), cfg.L);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic Kuramoto-Sivashinsky simulation engine"};
    app.set_version_flag("--version", sks::version_string);
    app.require_subcommand(1);

    CommonArgs check_args, sim_args, inv_args, mix_args, grad_args, ctl_args;
    std::string sim_y0 = "zero", inv_y0 = "zero", mix_y0 = "zero", mix_y2 = "random",
                grad_y0 = "zero", ctl_y0 = "random", ctl_target = "random";
    std::vector<std::string> occupation_args;
    int ctl_refine = 1;

    auto* check = app.add_subcommand("check", "admissibility and regularity-window report");
    add_common(check, check_args);

    auto* simulate = app.add_subcommand("simulate", "integrate one trajectory, write trajectory CSV");
    add_common(simulate, sim_args);
    simulate->add_option("--y0", sim_y0, "initial condition: zero | random | snapshot path");

    auto* invariant = app.add_subcommand("invariant", "time-averaged statistics CSV");
    add_common(invariant, inv_args);
    invariant->add_option("--y0", inv_y0, "initial condition");
    invariant->add_option("--occupation", occupation_args, "occupation pair alpha,R (repeatable)");

    auto* mixing = app.add_subcommand("mixing", "two-start long-run agreement report");
    add_common(mixing, mix_args);
    mixing->add_option("--y0", mix_y0, "first start");
    mixing->add_option("--y2", mix_y2, "second start");

    auto* gradient = app.add_subcommand("gradient", "Monte-Carlo semigroup gradient estimate");
    add_common(gradient, grad_args);
    gradient->add_option("--y0", grad_y0, "base point");

    auto* control = app.add_subcommand("control", "reachability control synthesis and replay");
    add_common(control, ctl_args);
    control->add_option("--y0", ctl_y0, "start state");
    control->add_option("--target", ctl_target, "target state: zero | random | snapshot path");
    control->add_option("--refine", ctl_refine, "synthesis substeps per dt (1 = replay scheme)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(resolve(check_args), check_args.out_path);
        if (simulate->parsed()) return cmd_simulate(resolve(sim_args), sim_args.out_path, sim_y0);
        if (invariant->parsed())
            return cmd_invariant(resolve(inv_args), inv_args.out_path, inv_y0, occupation_args);
        if (mixing->parsed()) return cmd_mixing(resolve(mix_args), mix_args.out_path, mix_y0, mix_y2);
        if (gradient->parsed()) return cmd_gradient(resolve(grad_args), grad_args.out_path, grad_y0);
        if (control->parsed())
            return cmd_control(resolve(ctl_args), ctl_args.out_path, ctl_y0, ctl_target, ctl_refine);
    } catch (const sks::BlowUpError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const sks::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
