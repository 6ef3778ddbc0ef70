#include "chiralflow/runner.hpp"

#include "chiralflow/errors.hpp"
#include "chiralflow/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace chiralflow {

namespace {

constexpr std::string_view generator_id = "chiralflow 0.1.0";

Eigen::MatrixXcd to_lab_rows(const Eigen::MatrixXcd& gauged, const std::vector<double>& t,
                             const SystemSpectrum& spectrum)
{
    Eigen::MatrixXcd lab = gauged;
    for (Eigen::Index i = 0; i < lab.rows(); ++i) {
        for (Eigen::Index n = 0; n < lab.cols(); ++n) {
            lab(i, n) *= std::polar(1.0, -spectrum.omega_n[n] * t[static_cast<std::size_t>(i)]);
        }
    }
    return lab;
}

json cplx_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

} // namespace

RunResult run(const RunConfig& cfg_in)
{
    cfg_in.validate();
    RunResult res;
    res.config = resolve(cfg_in);
    const RunConfig& cfg = res.config;
    res.spectrum = build_spectrum(cfg.chain, cfg.convention);
    res.t = cfg.evolve.grid();
    const int N = cfg.chain.N;

    std::array<std::vector<ReducedDensityMatrix>, 2> rho;
    for (int s = 0; s < 2; ++s) {
        auto [c0, c] = cfg.initial_pair[s].resolve(N);
        res.c0[s] = c0;
        rho[s].reserve(res.t.size());
        switch (cfg.engine) {
            case Engine::FullPropagator: {
                if (s == 0) res.modes = sample_modes(cfg.bath);
                const AmplitudeState init = make_state(c0, c, cfg.bath.k_max);
                const auto states = evolve(init, cfg.evolve, res.spectrum, res.modes);
                res.amplitudes[s].resize(static_cast<Eigen::Index>(states.size()), N);
                res.norm_defect[s].resize(states.size());
                for (std::size_t i = 0; i < states.size(); ++i) {
                    const AmplitudeState lab = to_frame(states[i], Frame::Lab, res.spectrum, res.modes);
                    res.amplitudes[s].row(static_cast<Eigen::Index>(i)) = lab.c.transpose();
                    res.norm_defect[s][i] = lab.norm_defect();
                    rho[s].push_back(reduced_density(lab));
                }
                break;
            }
            case Engine::KernelVolterra:
            case Engine::Analytic3: {
                const KernelParams kp = KernelParams::from(cfg.bath, res.spectrum, cfg.kernel_variant);
                Eigen::MatrixXcd gauged;
                if (cfg.engine == Engine::KernelVolterra) {
                    gauged = evolve_volterra(c, kp, cfg.evolve.t_max, cfg.evolve.n_samples,
                                             cfg.evolve.rel_tol, cfg.evolve.abs_tol).c;
                } else {
                    RationalSolution sol = solve_laplace(kp, c);
                    gauged.resize(static_cast<Eigen::Index>(res.t.size()), N);
                    for (std::size_t i = 0; i < res.t.size(); ++i) {
                        gauged.row(static_cast<Eigen::Index>(i)) = sol.evaluate(res.t[i]).transpose();
                    }
                    if (s == 0) {
                        for (const auto& d : sol.diagnostics) res.diagnostics.push_back("analytic: " + d);
                        res.residues = std::move(sol);
                    }
                }
                res.amplitudes[s] = to_lab_rows(gauged, res.t, res.spectrum);
                for (Eigen::Index i = 0; i < res.amplitudes[s].rows(); ++i) {
                    const double population = std::norm(c0) + res.amplitudes[s].row(i).squaredNorm();
                    if (population > 1.0 + 1e-6) {
                        std::ostringstream os;
                        os.precision(10);
                        os << "kernel variant " << to_string(cfg.kernel_variant) << " drives the population of state "
                           << s + 1 << " to " << population << " at t = " << res.t[static_cast<std::size_t>(i)]
                           << "; the amplitudes are not physical for these parameters";
                        const KernelParams kp = KernelParams::from(cfg.bath, res.spectrum, cfg.kernel_variant);
                        if (kp.size() <= 8) {
                            double growth = -INFINITY;
                            for (const Pole& p : find_poles(characteristic_polynomial(kp))) {
                                growth = std::max(growth, p.value.real());
                            }
                            os << " (largest pole real part " << growth << ")";
                        }
                        throw NormalizationError(os.str());
                    }
                    rho[s].push_back(reduced_density(c0, res.amplitudes[s].row(i).transpose()));
                }
                break;
            }
        }
    }

    res.series = flow_series(res.t, rho[0], rho[1], cfg.deadband);
    res.segments = segment_flow(res.series.R, res.series.t, cfg.deadband);
    if (res.segments.degenerate) {
        res.diagnostics.push_back("degenerate flow: |R| never exceeds the dead band");
    }
    return res;
}

json provenance(const RunConfig& resolved)
{
    json p;
    p["generator"] = std::string(generator_id);
    p["prng"] = std::string(prng_id);
    p["frequency_convention"] = std::string(to_string(resolved.convention));
    p["kernel_variant"] = std::string(to_string(resolved.kernel_variant));
    p["engine"] = std::string(to_string(resolved.engine));
    p["omega_g_definition"] = "E_g";
    p["time_unit"] = "hbar/|J1| (dimensionless)";
    p["config"] = to_json(resolved);
    return p;
}

std::string series_csv(const FlowSeries& series, const FlowSegments& segments)
{
    io::CsvWriter csv({"t", "D", "R", "sign"});
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        csv.add_row(std::vector<std::string>{io::format_double(series.t[i]), io::format_double(series.D[i]),
                                             io::format_double(series.R[i]),
                                             std::to_string(segments.sample_sign[i])});
    }
    return csv.str();
}

json segments_json(const RunResult& result)
{
    json j;
    j["provenance"] = provenance(result.config);
    json m;
    m["n_switch"] = result.segments.n_switch;
    m["A_mod"] = result.segments.A_mod;
    m["fraction_positive"] = result.segments.fraction_positive;
    m["degenerate"] = result.segments.degenerate;
    m["n_segments"] = result.segments.segments.size();
    j["metrics"] = m;
    json segs = json::array();
    for (const auto& s : result.segments.segments) {
        segs.push_back(json{{"t_start", s.t_start}, {"t_end", s.t_end}, {"sign", s.sign},
                            {"first", s.first}, {"last", s.last}});
    }
    j["segments"] = segs;
    j["diagnostics"] = result.diagnostics;
    return j;
}

json residue_report(const RationalSolution& sol)
{
    json j;
    json poles = json::array();
    for (const Pole& p : sol.poles) {
        poles.push_back(json{{"value", cplx_json(p.value)}, {"multiplicity", p.multiplicity},
                             {"spread", p.spread}});
    }
    j["poles"] = poles;
    json den = json::array();
    for (cplx a : sol.denominator.coefficients()) den.push_back(cplx_json(a));
    j["denominator_coefficients"] = den;
    json channels = json::array();
    for (std::size_t ch = 0; ch < sol.channels(); ++ch) {
        json per_pole = json::array();
        for (const auto& terms : sol.residue_terms[ch]) {
            json tj = json::array();
            for (cplx a : terms) tj.push_back(cplx_json(a));
            per_pole.push_back(tj);
        }
        channels.push_back(json{{"channel", ch + 1}, {"terms", per_pole}});
    }
    j["residues"] = channels;
    j["diagnostics"] = sol.diagnostics;
    return j;
}

std::vector<std::filesystem::path> write_run(const RunResult& result, const std::filesystem::path& dir)
{
    const std::string prefix = result.config.output.prefix;
    std::vector<std::filesystem::path> written;
    const auto series_path = dir / (prefix + "_series.csv");
    io::write_text(series_path, series_csv(result.series, result.segments));
    written.push_back(series_path);
    const auto seg_path = dir / (prefix + "_segments.json");
    io::write_text(seg_path, segments_json(result).dump(2) + "\n");
    written.push_back(seg_path);
    if (result.residues) {
        const auto res_path = dir / (prefix + "_residues.json");
        json r = residue_report(*result.residues);
        r["provenance"] = provenance(result.config);
        io::write_text(res_path, r.dump(2) + "\n");
        written.push_back(res_path);
    }
    if (result.config.output.svg) {
        const auto svg_path = dir / (prefix + "_R.svg");
        io::write_text(svg_path, io::svg_line_chart("trace distance and its derivative", "t",
                                                    result.series.t,
                                                    {{"R(t)", result.series.R, "#c0392b"},
                                                     {"D(t)", result.series.D, "#2c3e50"}}));
        written.push_back(svg_path);
    }
    return written;
}

std::string trajectory_csv(const std::vector<AmplitudeState>& states, bool verbose)
{
    if (states.empty()) return {};
    const Eigen::Index N = states.front().c.size();
    const Eigen::Index K = states.front().f.size();
    std::vector<std::string> header{"t"};
    for (Eigen::Index n = 1; n <= N; ++n) {
        header.push_back("re_c" + std::to_string(n));
        header.push_back("im_c" + std::to_string(n));
    }
    header.push_back("bath_population");
    header.push_back("norm_defect");
    if (verbose) {
        for (Eigen::Index k = 1; k <= K; ++k) {
            header.push_back("re_f" + std::to_string(k));
            header.push_back("im_f" + std::to_string(k));
        }
    }
    io::CsvWriter csv(header);
    for (const auto& s : states) {
        std::vector<double> row{s.t};
        for (Eigen::Index n = 0; n < N; ++n) {
            row.push_back(s.c[n].real());
            row.push_back(s.c[n].imag());
        }
        row.push_back(s.bath_population());
        row.push_back(s.norm_defect());
        if (verbose) {
            for (Eigen::Index k = 0; k < K; ++k) {
                row.push_back(s.f[k].real());
                row.push_back(s.f[k].imag());
            }
        }
        csv.add_row(row);
    }
    return csv.str();
}

bool SweepResult::all_failed() const
{
    return std::none_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.ok; });
}

RunConfig sweep_point_config(const RunConfig& base, const SweepSpec& spec, std::size_t index)
{
    const double value = spec.values.at(index);
    if (spec.policy == SeedPolicy::Shared) {
        return with_parameter(resolve(base), spec.parameter, value);
    }
    RunConfig cfg = with_parameter(base, spec.parameter, value);
    cfg.bath.seed = base.bath.seed + index;
    return resolve(cfg);
}

SweepResult sweep(const RunConfig& base, const SweepSpec& spec)
{
    spec.validate();
    base.validate();
    SweepResult result;
    result.base = resolve(base);
    result.spec = spec;
    result.points.resize(spec.values.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < spec.values.size(); i = next++) {
            SweepPoint& pt = result.points[i];
            pt.value = spec.values[i];
            try {
                const RunResult r = run(sweep_point_config(base, spec, i));
                pt.series = r.series;
                pt.segments = r.segments;
                pt.ok = true;
            } catch (const std::exception& e) {
                pt.ok = false;
                pt.error = e.what();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), spec.values.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return result;
}

std::string sweep_csv(const SweepResult& result)
{
    io::CsvWriter csv({result.spec.parameter, "n_switch", "A_mod", "fraction_positive", "status"});
    for (const auto& pt : result.points) {
        if (pt.ok) {
            csv.add_row(std::vector<std::string>{io::format_double(pt.value), std::to_string(pt.segments.n_switch),
                                                 io::format_double(pt.segments.A_mod),
                                                 io::format_double(pt.segments.fraction_positive), "ok"});
        } else {
            csv.add_row(std::vector<std::string>{io::format_double(pt.value), "", "", "", "error: " + pt.error});
        }
    }
    return csv.str();
}

json sweep_json(const SweepResult& result)
{
    json j;
    j["provenance"] = provenance(result.base);
    j["sweep"] = to_json(result.spec);
    json rows = json::array();
    for (const auto& pt : result.points) {
        json r;
        r["value"] = pt.value;
        r["ok"] = pt.ok;
        if (pt.ok) {
            r["n_switch"] = pt.segments.n_switch;
            r["A_mod"] = pt.segments.A_mod;
            r["fraction_positive"] = pt.segments.fraction_positive;
            r["degenerate"] = pt.segments.degenerate;
        } else {
            r["error"] = pt.error;
        }
        rows.push_back(r);
    }
    j["points"] = rows;
    return j;
}

CompareReport compare(const RunConfig& cfg, Engine first, Engine second)
{
    RunConfig a = cfg;
    a.engine = first;
    RunConfig b = cfg;
    b.engine = second;
    const RunResult ra = run(a);
    const RunResult rb = run(b);
    CompareReport rep{first, second, 0.0, 0.0, 0.0, provenance(ra.config)};
    for (std::size_t i = 0; i < ra.series.t.size(); ++i) {
        rep.max_abs_dD = std::max(rep.max_abs_dD, std::abs(ra.series.D[i] - rb.series.D[i]));
        rep.max_abs_dR = std::max(rep.max_abs_dR, std::abs(ra.series.R[i] - rb.series.R[i]));
    }
    for (int s = 0; s < 2; ++s) {
        const Eigen::MatrixXd diff = ra.amplitudes[s].cwiseAbs() - rb.amplitudes[s].cwiseAbs();
        rep.max_abs_damplitude = std::max(rep.max_abs_damplitude, diff.cwiseAbs().maxCoeff());
    }
    return rep;
}

json to_json(const CompareReport& report)
{
    json j;
    j["provenance"] = report.provenance;
    j["first"] = std::string(to_string(report.first));
    j["second"] = std::string(to_string(report.second));
    j["max_abs_dD"] = report.max_abs_dD;
    j["max_abs_dR"] = report.max_abs_dR;
    j["max_abs_damplitude"] = report.max_abs_damplitude;
    return j;
}

} // namespace chiralflow
