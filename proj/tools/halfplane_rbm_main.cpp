// Batch front-end for the half-plane RBM stationary-density library.
//
// Commands: check | curves | transform | density | tails | simulate | compare,
// plus `replay manifest.json` which re-runs a previous invocation from the
// settings recorded next to its outputs.  All numeric output is written with
// %.17g so a replay is byte-identical (the manifest's duration field aside).
//
// Exit codes: 0 success, 2 invalid model, 3 numerical failure, 4 I/O.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hprbm/asymptotics.hpp"
#include "hprbm/density.hpp"
#include "hprbm/io.hpp"
#include "hprbm/laplace.hpp"
#include "hprbm/simulate.hpp"
#include "hprbm/version.hpp"

namespace fs = std::filesystem;

namespace {

using hprbm::complex;
using hprbm::format_double;
using hprbm::json;

struct GridSpec {
    double lo = 0.0, hi = 0.0;
    int count = 0;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    char tail = '\0';
    const int got = std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.count, &tail);
    if (got != 3 || g.count < 1 || !(g.hi >= g.lo) || !std::isfinite(g.lo) ||
        !std::isfinite(g.hi)) {
        throw hprbm::IoError("grid spec must look like min:max:count, got '" + text + "'");
    }
    return g;
}

std::vector<double> grid_points(const GridSpec& g) {
    std::vector<double> xs(static_cast<std::size_t>(g.count));
    for (int i = 0; i < g.count; ++i) {
        xs[static_cast<std::size_t>(i)] =
            g.count == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.count - 1);
    }
    return xs;
}

// "u_min:u_max:nu,v_min:v_max:nv"
std::pair<GridSpec, GridSpec> parse_grid2(const std::string& text) {
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos) {
        throw hprbm::IoError("expected two axis specs separated by a comma, got '" + text + "'");
    }
    return {parse_grid(text.substr(0, comma)), parse_grid(text.substr(comma + 1))};
}

class CsvFile {
  public:
    explicit CsvFile(std::string header) { rows_ << header << '\n'; }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) rows_ << ',';
            rows_ << format_double(v);
            first = false;
        }
        rows_ << '\n';
    }

    void save(const fs::path& path) const { hprbm::write_text_file(path, rows_.str()); }

  private:
    std::ostringstream rows_;
};

fs::path ensure_out_dir(const std::string& out) {
    if (out.empty()) throw hprbm::IoError("this command needs --out DIR");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw hprbm::IoError("cannot create output directory " + out + ": " + ec.message());
    return fs::path(out);
}

hprbm::QuadratureConfig quad_from(const json& ov) {
    hprbm::QuadratureConfig q;
    if (ov.contains("quad_points")) {
        q.n_points = static_cast<std::size_t>(ov.at("quad_points").get<double>());
    }
    if (ov.contains("truncation")) q.truncation = ov.at("truncation").get<double>();
    q.validate();
    return q;
}

json tail_to_json(const hprbm::TailReport& r) {
    json j;
    j["side"] = r.side == hprbm::Side::plus ? "plus" : "minus";
    j["regime"] = hprbm::to_string(r.regime);
    j["gamma"] = r.gamma;
    j["kappa"] = r.kappa;
    j["branch_point"] = r.branch_point;
    j["pole"] = r.pole;
    j["r_star"] = r.r_star;
    return j;
}

// ---------------------------------------------------------------------------
// command bodies; each receives the fully resolved overrides so that replay
// goes through the exact same code path as the original invocation

void cmd_check(const hprbm::ModelParams& params, const std::string& out, const json&) {
    const hprbm::WhitenedModel m = hprbm::whiten(params);
    const hprbm::Geometry geom = hprbm::geometry(m);
    const auto [mass_plus, mass_minus] = hprbm::boundary_masses(m);
    const hprbm::TailReport tp = hprbm::tail_report(m, hprbm::Side::plus);
    const hprbm::TailReport tm = hprbm::tail_report(m, hprbm::Side::minus);
    const bool doubly_critical = tp.regime == hprbm::TailRegime::critical &&
                                 tm.regime == hprbm::TailRegime::critical;

    std::ostringstream rep;
    rep << "recurrent: yes\n";
    rep << "alpha: " << format_double(geom.alpha) << '\n';
    rep << "delta_plus: " << format_double(geom.delta_plus) << '\n';
    rep << "delta_minus: " << format_double(geom.delta_minus) << '\n';
    rep << "r_star_plus: " << format_double(geom.r_star_plus) << '\n';
    rep << "r_star_minus: " << format_double(geom.r_star_minus) << '\n';
    rep << "whitening_T: [[" << format_double(m.t11) << ", " << format_double(m.t12) << "], [0, "
        << format_double(m.t22) << "]]\n";
    rep << "jacobian: " << format_double(m.jacobian) << '\n';
    rep << "whitened_mu: [" << format_double(m.mu1) << ", " << format_double(m.mu2) << "]\n";
    rep << "whitened_slopes: [" << format_double(m.r_plus) << ", " << format_double(m.r_minus)
        << "]\n";
    rep << "boundary_mass_plus: " << format_double(mass_plus) << '\n';
    rep << "boundary_mass_minus: " << format_double(mass_minus) << '\n';
    for (const hprbm::TailReport& t : {tp, tm}) {
        rep << "tail_" << (t.side == hprbm::Side::plus ? "plus" : "minus")
            << ": regime=" << hprbm::to_string(t.regime) << " gamma=" << format_double(t.gamma)
            << " kappa=" << format_double(t.kappa) << '\n';
    }
    if (doubly_critical) rep << "note: doubly critical (both tails sit on the regime boundary)\n";

    std::fputs(rep.str().c_str(), stdout);
    if (!out.empty()) {
        const fs::path dir = ensure_out_dir(out);
        json j;
        j["recurrent"] = true;
        j["alpha"] = geom.alpha;
        j["delta_plus"] = geom.delta_plus;
        j["delta_minus"] = geom.delta_minus;
        j["r_star_plus"] = geom.r_star_plus;
        j["r_star_minus"] = geom.r_star_minus;
        j["whitening_T"] = {{m.t11, m.t12}, {0.0, m.t22}};
        j["jacobian"] = m.jacobian;
        j["whitened_mu"] = {m.mu1, m.mu2};
        j["whitened_slopes"] = {m.r_plus, m.r_minus};
        j["boundary_mass_plus"] = mass_plus;
        j["boundary_mass_minus"] = mass_minus;
        j["tail_plus"] = tail_to_json(tp);
        j["tail_minus"] = tail_to_json(tm);
        j["doubly_critical"] = doubly_critical;
        hprbm::write_text_file(dir / "report.json", j.dump(2) + "\n");
    }
}

void cmd_curves(const hprbm::ModelParams& params, const std::string& out, const json& ov) {
    const hprbm::WhitenedModel m = hprbm::whiten(params);
    const hprbm::Geometry geom = hprbm::geometry(m);
    const hprbm::QuadratureConfig quad = quad_from(ov);
    const hprbm::LogGtildeTable table =
        hprbm::build_log_table(m, geom, quad.n_points, quad.truncation);

    const fs::path dir = ensure_out_dir(out);
    CsvFile csv("t,re_G,im_G,re_log_Gtilde,im_log_Gtilde");
    for (double t : grid_points(parse_grid(ov.at("grid").get<std::string>()))) {
        const complex g = hprbm::coefficient_G(m, t);
        const complex lg = hprbm::log_gtilde_at(table, t);
        csv.row({t, g.real(), g.imag(), lg.real(), lg.imag()});
    }
    csv.save(dir / "curves.csv");
}

void cmd_transform(const hprbm::ModelParams& params, const std::string& out, const json& ov) {
    const hprbm::WhitenedModel m = hprbm::whiten(params);
    const hprbm::LateralTransformEngine eng = hprbm::build_engine(m, quad_from(ov));
    const fs::path dir = ensure_out_dir(out);

    const std::string axis = ov.at("axis_grid").get<std::string>();
    if (!axis.empty()) {
        CsvFile csv("t,re_phi_plus,im_phi_plus,re_phi_minus,im_phi_minus,bvp_residual");
        for (double t : grid_points(parse_grid(axis))) {
            const hprbm::LateralPair p = hprbm::phi_pair_on_axis(eng, t);
            const complex g = hprbm::coefficient_G(m, t);
            const double resid = std::abs(p.plus - g * p.minus) / std::abs(p.plus);
            csv.row({t, p.plus.real(), p.plus.imag(), p.minus.real(), p.minus.imag(), resid});
        }
        csv.save(dir / "axis.csv");
    }

    const std::string points = ov.at("points").get<std::string>();
    if (!points.empty()) {
        CsvFile csv("x_re,x_im,y_re,y_im,re_phi,im_phi");
        std::stringstream ss(points);
        std::string item;
        while (std::getline(ss, item, ';')) {
            double xr, xi, yr, yi;
            char tail = '\0';
            if (std::sscanf(item.c_str(), "%lf,%lf,%lf,%lf%c", &xr, &xi, &yr, &yi, &tail) != 4) {
                throw hprbm::IoError("point spec must be x_re,x_im,y_re,y_im; got '" + item + "'");
            }
            const complex val = hprbm::phi_bivariate(eng, complex{xr, xi}, complex{yr, yi});
            csv.row({xr, xi, yr, yi, val.real(), val.imag()});
        }
        csv.save(dir / "points.csv");
    }
}

void cmd_density(const hprbm::ModelParams& params, const std::string& out, const json& ov) {
    const hprbm::WhitenedModel m = hprbm::whiten(params);
    const auto [ug, vg] = parse_grid2(ov.at("grid").get<std::string>());
    if (!(vg.lo > 0.0)) throw hprbm::IoError("density grid must stay above the boundary (v > 0)");

    const std::string polar = ov.at("polar_grid").get<std::string>();
    double v_min = vg.lo;
    std::vector<double> rs, thetas;
    if (!polar.empty()) {
        const auto [rg, tg] = parse_grid2(polar);
        rs = grid_points(rg);
        thetas = grid_points(tg);
        for (double r : rs) {
            for (double th : thetas) {
                const double v = r * std::sin(th);
                if (!(v > 0.0)) {
                    throw hprbm::IoError("polar grid touches the boundary; keep r > 0 and "
                                         "theta inside (0, pi)");
                }
                v_min = std::min(v_min, v);
            }
        }
    }

    const hprbm::LateralTransformEngine eng = hprbm::build_engine(m, quad_from(ov));
    hprbm::InversionConfig icfg;
    icfg.v_min = v_min;
    const hprbm::InteriorInverter inv(eng, icfg);

    const fs::path dir = ensure_out_dir(out);
    const hprbm::DensityGrid grid = hprbm::fill_grid(inv, grid_points(ug), grid_points(vg));
    CsvFile csv("u,v,density");
    for (std::size_t i = 0; i < grid.vs.size(); ++i) {
        for (std::size_t j = 0; j < grid.us.size(); ++j) {
            csv.row({grid.us[j], grid.vs[i], grid.values[i * grid.us.size() + j]});
        }
    }
    csv.save(dir / "density.csv");

    CsvFile marg("v,integrated,closed_form");
    for (double v : grid.vs) {
        marg.row({v, hprbm::marginal_by_integration(inv, v), hprbm::vertical_marginal(m, v)});
    }
    marg.save(dir / "marginal.csv");

    if (!polar.empty()) {
        CsvFile pcsv("r,theta,density");
        for (double r : rs) {
            for (double th : thetas) {
                pcsv.row({r, th, inv.density(r * std::cos(th), r * std::sin(th))});
            }
        }
        pcsv.save(dir / "polar.csv");
    }
}

void cmd_tails(const hprbm::ModelParams& params, const std::string& out, const json& ov) {
    const hprbm::WhitenedModel m = hprbm::whiten(params);
    const hprbm::Geometry geom = hprbm::geometry(m);
    const hprbm::TailReport tp = hprbm::tail_report(m, hprbm::Side::plus);
    const hprbm::TailReport tm = hprbm::tail_report(m, hprbm::Side::minus);

    const fs::path dir = ensure_out_dir(out);
    json j;
    j["plus"] = tail_to_json(tp);
    j["minus"] = tail_to_json(tm);
    j["doubly_critical"] = tp.regime == hprbm::TailRegime::critical &&
                           tm.regime == hprbm::TailRegime::critical;
    hprbm::write_text_file(dir / "tails.json", j.dump(2) + "\n");

    CsvFile csv("theta,profile");
    for (double th : grid_points(parse_grid(ov.at("grid").get<std::string>()))) {
        csv.row({th, hprbm::origin_profile(geom, th)});
    }
    csv.save(dir / "profile.csv");
}

void cmd_simulate(const hprbm::ModelParams& params, const std::string& out, const json& ov) {
    const hprbm::WhitenedModel m = hprbm::whiten(params);
    const hprbm::SimInputs in = hprbm::parse_sim_inputs(ov);
    const hprbm::SimResult res = hprbm::run_simulation(m, in.config, in.histogram);

    const fs::path dir = ensure_out_dir(out);
    json j;
    j["coordinates"] = "whitened";
    j["config"] = {{"step", res.config.step},
                   {"n_steps", res.config.n_steps},
                   {"burn_in", res.config.burn_in},
                   {"seed", res.config.seed},
                   {"strip", res.config.effective_strip()}};
    j["histogram"] = {{"u_lo", res.spec.u_lo},   {"u_hi", res.spec.u_hi},
                      {"v_hi", res.spec.v_hi},   {"nu", res.spec.nu},
                      {"nv", res.spec.nv},       {"boundary_bins", res.spec.boundary_bins}};
    j["recorded_steps"] = res.recorded_steps;
    j["n_effective"] = res.n_effective;
    j["local_time_plus"] = res.local_time_plus;
    j["local_time_plus_se"] = res.local_time_plus_se;
    j["local_time_minus"] = res.local_time_minus;
    j["local_time_minus_se"] = res.local_time_minus_se;
    j["mean_height"] = res.mean_height;
    j["cell_mass"] = res.cell_mass;
    j["cell_se"] = res.cell_se;
    j["strip_density"] = res.strip_density;
    j["strip_se"] = res.strip_se;
    hprbm::write_text_file(dir / "summary.json", j.dump(2) + "\n");

    const double du = (res.spec.u_hi - res.spec.u_lo) / res.spec.nu;
    const double dv = res.spec.v_hi / res.spec.nv;
    CsvFile cells("u_center,v_center,mass,se");
    for (int i = 0; i < res.spec.nv; ++i) {
        for (int jx = 0; jx < res.spec.nu; ++jx) {
            const std::size_t idx = static_cast<std::size_t>(i) * res.spec.nu + jx;
            cells.row({res.spec.u_lo + (jx + 0.5) * du, (i + 0.5) * dv, res.cell_mass[idx],
                       res.cell_se[idx]});
        }
    }
    cells.save(dir / "cells.csv");

    const double dub = (res.spec.u_hi - res.spec.u_lo) / res.spec.boundary_bins;
    CsvFile strip("u_center,density,se");
    for (int b = 0; b < res.spec.boundary_bins; ++b) {
        const std::size_t idx = static_cast<std::size_t>(b);
        strip.row({res.spec.u_lo + (b + 0.5) * dub, res.strip_density[idx], res.strip_se[idx]});
    }
    strip.save(dir / "strip.csv");
}

void cmd_compare(const hprbm::ModelParams& params, const std::string& out, const json& ov) {
    const std::string result_dir = ov.at("result").get<std::string>();
    const json summary = hprbm::load_json_file((fs::path(result_dir) / "summary.json").string());

    hprbm::HistogramSpec spec;
    try {
        const json& h = summary.at("histogram");
        spec.u_lo = h.at("u_lo").get<double>();
        spec.u_hi = h.at("u_hi").get<double>();
        spec.v_hi = h.at("v_hi").get<double>();
        spec.nu = h.at("nu").get<int>();
        spec.nv = h.at("nv").get<int>();
        spec.boundary_bins = h.at("boundary_bins").get<int>();
        spec.validate();
    } catch (const json::exception& e) {
        throw hprbm::IoError("summary.json histogram block: " + std::string(e.what()));
    }
    std::vector<double> cell_mass, cell_se, strip_density;
    double strip_width = 0.0;
    try {
        cell_mass = summary.at("cell_mass").get<std::vector<double>>();
        cell_se = summary.at("cell_se").get<std::vector<double>>();
        strip_density = summary.at("strip_density").get<std::vector<double>>();
        strip_width = summary.at("config").at("strip").get<double>();
    } catch (const json::exception& e) {
        throw hprbm::IoError("summary.json histogram data: " + std::string(e.what()));
    }

    const hprbm::WhitenedModel m = hprbm::whiten(params);
    const hprbm::LateralTransformEngine eng = hprbm::build_engine(m, quad_from(ov));
    const double dv = spec.v_hi / spec.nv;
    hprbm::InversionConfig icfg;
    // lowest 2x2 Gauss node inside the first cell row
    icfg.v_min = std::min(0.05, 0.21 * dv);
    const hprbm::InteriorInverter inv(eng, icfg);

    // the recorded histogram excludes the boundary strip, so the predicted
    // masses are clipped the same way before both are normalized
    const std::vector<double> predicted = hprbm::predicted_cell_mass(
        spec, [&](double u, double v) { return inv.density(u, v); }, strip_width);
    const hprbm::DiscrepancyReport rep =
        hprbm::compare_histogram(cell_mass, cell_se, predicted);

    const fs::path dir = ensure_out_dir(out);
    const double du = (spec.u_hi - spec.u_lo) / spec.nu;
    CsvFile cells("u_center,v_center,observed,predicted,abs_diff");
    for (int i = 0; i < spec.nv; ++i) {
        for (int jx = 0; jx < spec.nu; ++jx) {
            const std::size_t idx = static_cast<std::size_t>(i) * spec.nu + jx;
            cells.row({spec.u_lo + (jx + 0.5) * du, (i + 0.5) * dv, cell_mass[idx],
                       predicted[idx], std::abs(cell_mass[idx] - predicted[idx])});
        }
    }
    cells.save(dir / "cell_compare.csv");

    // Boundary strip: the trace is singular at the corner, so bins touching a
    // small window around u = 0 are reported but left out of the statistics.
    hprbm::BoundaryInverter binv(eng);
    const double dub = (spec.u_hi - spec.u_lo) / spec.boundary_bins;
    const double gx = 0.5773502691896257;
    CsvFile strip("u_center,observed,predicted,abs_diff,skipped");
    double strip_sup = 0.0;
    int strip_bins = 0;
    for (int b = 0; b < spec.boundary_bins; ++b) {
        const double uc = spec.u_lo + (b + 0.5) * dub;
        const bool skip = std::abs(uc) - 0.5 * dub < 0.3;
        double pred = 0.0, diff = 0.0;
        if (!skip) {
            pred = 0.5 * (binv.line_density(uc - 0.5 * gx * dub) +
                          binv.line_density(uc + 0.5 * gx * dub));
            diff = std::abs(strip_density[static_cast<std::size_t>(b)] - pred);
            strip_sup = std::max(strip_sup, diff);
            ++strip_bins;
        }
        strip.row({uc, strip_density[static_cast<std::size_t>(b)], pred, diff,
                   skip ? 1.0 : 0.0});
    }
    strip.save(dir / "strip_compare.csv");

    json j;
    j["cells"] = {{"l1", rep.l1},
                  {"sup_abs", rep.sup_abs},
                  {"flagged", rep.flagged},
                  {"unseen", rep.unseen},
                  {"unseen_mass", rep.unseen_mass},
                  {"count", rep.cells}};
    j["strip"] = {{"sup_abs", strip_sup}, {"bins_compared", strip_bins}};
    hprbm::write_text_file(dir / "compare.json", j.dump(2) + "\n");

    std::printf("cells: l1=%s sup=%s flagged=%d/%d unseen=%d\n", format_double(rep.l1).c_str(),
                format_double(rep.sup_abs).c_str(), rep.flagged, rep.cells, rep.unseen);
    std::printf("strip: sup=%s over %d bins\n", format_double(strip_sup).c_str(), strip_bins);
}

void run_command(const std::string& name, const std::string& model_path,
                 const std::string& out_dir, const json& overrides) {
    const auto started = std::chrono::steady_clock::now();
    const hprbm::ModelParams params = hprbm::load_model(model_path);

    if (name == "check") {
        cmd_check(params, out_dir, overrides);
    } else if (name == "curves") {
        cmd_curves(params, out_dir, overrides);
    } else if (name == "transform") {
        cmd_transform(params, out_dir, overrides);
    } else if (name == "density") {
        cmd_density(params, out_dir, overrides);
    } else if (name == "tails") {
        cmd_tails(params, out_dir, overrides);
    } else if (name == "simulate") {
        cmd_simulate(params, out_dir, overrides);
    } else if (name == "compare") {
        cmd_compare(params, out_dir, overrides);
    } else {
        throw hprbm::IoError("manifest names unknown command '" + name + "'");
    }

    if (!out_dir.empty()) {
        hprbm::RunManifest man;
        man.command = name;
        man.model_path = model_path;
        man.out_dir = out_dir;
        man.overrides = overrides;
        man.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        man.save(fs::path(out_dir));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary distribution of reflected Brownian motion in a half-plane"};
    app.set_version_flag("--version", hprbm::kVersion);
    app.require_subcommand(1);

    std::string model_path, out_dir, sim_path, manifest_path, result_dir;
    std::string grid, axis_grid = "-50:50:1001", points, polar_grid;
    double truncation = 0.0;
    std::size_t quad_points = 0;
    std::int64_t seed = -1;

    auto add_quad = [&](CLI::App* sc) {
        sc->add_option("--quad-points", quad_points, "nodes for the log-coefficient table");
        sc->add_option("--truncation", truncation, "half-width of the log-coefficient table");
    };
    auto quad_overrides = [&](json& ov) {
        if (quad_points > 0) ov["quad_points"] = static_cast<double>(quad_points);
        if (truncation > 0.0) ov["truncation"] = truncation;
    };

    CLI::App* check = app.add_subcommand("check", "validate a model and report its geometry");
    check->add_option("model", model_path, "model JSON file")->required();
    check->add_option("--out", out_dir, "optional report directory");

    CLI::App* curves = app.add_subcommand("curves", "dump the BVP coefficient along the axis");
    curves->add_option("model", model_path)->required();
    curves->add_option("--out", out_dir)->required();
    curves->add_option("--grid", grid, "t grid, min:max:count");
    add_quad(curves);

    CLI::App* transform = app.add_subcommand("transform", "dump lateral and bivariate transforms");
    transform->add_option("model", model_path)->required();
    transform->add_option("--out", out_dir)->required();
    transform->add_option("--axis-grid", axis_grid, "imaginary-axis grid, min:max:count");
    transform->add_option("--points", points, "bivariate points x_re,x_im,y_re,y_im;...");
    add_quad(transform);

    CLI::App* density = app.add_subcommand("density", "invert the transform on a grid");
    density->add_option("model", model_path)->required();
    density->add_option("--out", out_dir)->required();
    density->add_option("--grid", grid, "u_min:u_max:nu,v_min:v_max:nv");
    density->add_option("--polar-grid", polar_grid, "r_min:r_max:nr,th_min:th_max:nth");
    add_quad(density);

    CLI::App* tails = app.add_subcommand("tails", "decay-rate reports and the origin profile");
    tails->add_option("model", model_path)->required();
    tails->add_option("--out", out_dir)->required();
    tails->add_option("--grid", grid, "theta grid for the profile table");

    CLI::App* simulate = app.add_subcommand("simulate", "Euler scheme with boundary projection");
    simulate->add_option("model", model_path)->required();
    simulate->add_option("sim", sim_path, "simulation config JSON (optional)");
    simulate->add_option("--out", out_dir)->required();
    simulate->add_option("--seed", seed, "override the config seed");

    CLI::App* compare = app.add_subcommand("compare", "simulation output vs inverted density");
    compare->add_option("result", result_dir, "directory written by simulate")->required();
    compare->add_option("model", model_path)->required();
    compare->add_option("--out", out_dir)->required();
    add_quad(compare);

    CLI::App* replay = app.add_subcommand("replay", "re-run a command from its manifest");
    replay->add_option("manifest", manifest_path)->required();
    replay->add_option("--out", out_dir, "redirect outputs (default: manifest's directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(check)) {
            run_command("check", model_path, out_dir, json::object());
        } else if (app.got_subcommand(curves)) {
            json ov;
            ov["grid"] = grid.empty() ? "-50:50:2001" : grid;
            quad_overrides(ov);
            run_command("curves", model_path, out_dir, ov);
        } else if (app.got_subcommand(transform)) {
            json ov;
            ov["axis_grid"] = axis_grid;
            ov["points"] = points;
            quad_overrides(ov);
            run_command("transform", model_path, out_dir, ov);
        } else if (app.got_subcommand(density)) {
            json ov;
            ov["grid"] = grid.empty() ? "-4:4:81,0.05:4:80" : grid;
            ov["polar_grid"] = polar_grid;
            quad_overrides(ov);
            run_command("density", model_path, out_dir, ov);
        } else if (app.got_subcommand(tails)) {
            json ov;
            ov["grid"] = grid.empty() ? "0:3.141592653589793:65" : grid;
            run_command("tails", model_path, out_dir, ov);
        } else if (app.got_subcommand(simulate)) {
            hprbm::SimInputs in;
            if (!sim_path.empty()) in = hprbm::load_sim_inputs(sim_path);
            if (seed >= 0) in.config.seed = static_cast<std::uint64_t>(seed);
            json ov;
            ov["step"] = in.config.step;
            ov["n_steps"] = static_cast<double>(in.config.n_steps);
            ov["burn_in"] = static_cast<double>(in.config.burn_in);
            ov["seed"] = static_cast<double>(in.config.seed);
            ov["strip"] = in.config.strip;
            ov["histogram"] = {{"u_lo", in.histogram.u_lo}, {"u_hi", in.histogram.u_hi},
                               {"v_hi", in.histogram.v_hi}, {"nu", in.histogram.nu},
                               {"nv", in.histogram.nv},
                               {"boundary_bins", in.histogram.boundary_bins}};
            run_command("simulate", model_path, out_dir, ov);
        } else if (app.got_subcommand(compare)) {
            json ov;
            ov["result"] = result_dir;
            quad_overrides(ov);
            run_command("compare", model_path, out_dir, ov);
        } else if (app.got_subcommand(replay)) {
            const hprbm::RunManifest man = hprbm::load_manifest(manifest_path);
            run_command(man.command, man.model_path, out_dir.empty() ? man.out_dir : out_dir,
                        man.overrides);
        }
    } catch (const hprbm::ModelError& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return 2;
    } catch (const hprbm::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const hprbm::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    }
    return 0;
}
