// Command-line surface for the lattice prediction library: simulation,
// spectral estimation, cepstral coefficients, prediction, AR fitting, order
// selection, point gridding, and the Monte Carlo benchmark.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fexp/fexp.hpp"

using json = nlohmann::json;
using namespace fexp;

namespace {

std::pair<int, int> parse_int_pair(const std::string& s, const char* what) {
    int a = 0, b = 0;
    char comma = 0;
    std::istringstream is(s);
    if (!(is >> a >> comma >> b) || comma != ',')
        throw validation_error(std::string(what) + ": expected two comma-separated integers, got '" + s + "'");
    return {a, b};
}

Lattice2D load_lattice(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open lattice file '" + path + "'");
    return read_lattice_csv(in);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open output file '" + path + "'");
    out << text;
}

json window_to_json(const ARWindow& w) {
    return json{{"pL1", w.pL1}, {"pU1", w.pU1}, {"pL2", w.pL2}, {"pU2", w.pU2}};
}

// ---------------------------------------------------------------------------

struct GlobalOpts {
    std::string output;
    std::string format;  ///< per-command default when empty
    std::optional<std::uint64_t> seed;
};

int cmd_simulate(const GlobalOpts& g, double tau, const std::string& dims_s, const std::string& dist_s) {
    const auto [n1, n2] = parse_int_pair(dims_s, "--dims");
    const Lattice2D x =
        simulate_field(tau, GridDims(n1, n2), dist_from_string(dist_s), g.seed.value_or(7968ull));
    std::ostringstream os;
    write_lattice_csv(os, x);
    write_text(g.output, os.str());
    return 0;
}

int cmd_spectrum(const GlobalOpts& g, const std::string& lattice_path, const std::string& bw_s,
                 bool no_demean) {
    const Lattice2D x = load_lattice(lattice_path);
    const auto [m1, m2] = parse_int_pair(bw_s, "--bandwidth");
    const SmoothingBandwidth bw(x.dims(), m1, m2);
    if (!bw.c4_guidance_met())
        std::cerr << "warning: bandwidth below the m >= n^(3/4) smoothing guidance; "
                     "the estimate may be undersmoothed\n";
    const SpectralGrid f = smoothed_spectrum(x, bw, SpectralOptions{!no_demean, 1e-12});
    std::ostringstream os;
    write_spectral_csv(os, f);
    write_text(g.output, os.str());
    return 0;
}

int cmd_cepstrum(const GlobalOpts& g, const std::string& spectrum_path,
                 const std::string& lattice_path, const std::string& bw_s,
                 const std::string& order_s, const std::string& emit, bool no_demean) {
    const HalfPlaneOrder order = order_from_string(order_s);
    SpectralGrid f;
    if (!spectrum_path.empty()) {
        if (order != HalfPlaneOrder::RowLex)
            throw validation_error("cepstrum: --order col requires --lattice input "
                                   "(the grid must come from the transposed field)");
        std::ifstream in(spectrum_path);
        if (!in) throw validation_error("cannot open spectrum file '" + spectrum_path + "'");
        f = read_spectral_csv(in);
    } else if (!lattice_path.empty()) {
        if (bw_s.empty()) throw validation_error("cepstrum: --lattice input needs --bandwidth");
        Lattice2D x = load_lattice(lattice_path);
        auto [m1, m2] = parse_int_pair(bw_s, "--bandwidth");
        if (order == HalfPlaneOrder::ColLex) {
            x = x.transposed();
            std::swap(m1, m2);
        }
        f = smoothed_spectrum(x, SmoothingBandwidth(x.dims(), m1, m2),
                              SpectralOptions{!no_demean, 1e-12});
    } else {
        throw validation_error("cepstrum: provide --spectrum or --lattice");
    }
    const CepstralField c = cepstral_coeffs(f, HalfPlaneWindow(f.M1(), f.M2()));
    const CepstralField tagged{HalfPlaneWindow(c.window.M1, c.window.M2, order), c.alpha0, c.alphas};
    std::ostringstream os;
    if (emit == "alpha") {
        write_cepstral_csv(os, tagged);
    } else if (emit == "ar") {
        const ARField a = ar_coeffs(transfer_grid(c));
        write_ar_csv(os, ARField{tagged.window, a.coeffs});
    } else if (emit == "ma") {
        const MAField m = ma_coeffs(c);
        write_ma_csv(os, MAField{tagged.window, m.coeffs});
    } else {
        throw validation_error("cepstrum: --emit must be alpha|ar|ma");
    }
    write_text(g.output, os.str());
    return 0;
}

int cmd_predict(const GlobalOpts& g, const std::string& lattice_path, const std::string& coeffs_path,
                const std::string& target_s, const std::string& order_s, bool allow_observed) {
    const Lattice2D x = load_lattice(lattice_path);
    std::ifstream in(coeffs_path);
    if (!in) throw validation_error("cannot open coefficients file '" + coeffs_path + "'");
    const ARField a = read_ar_csv(in);
    const auto [r, c] = parse_int_pair(target_s, "--target");
    const Index2 target{r, c};
    if (order_s != "auto") {
        const HalfPlaneOrder want = order_from_string(order_s);
        if (want != a.window.order)
            throw validation_error("predict: coefficients were fit for the " +
                                   std::string(to_string(a.window.order)) + " ordering");
    } else {
        // sanity: a boundary target must extend the coefficients' ordering
        const HalfPlaneOrder loc = choose_ordering(target, x.dims());
        const bool interior = x.in_bounds(target);
        if (!interior && loc != a.window.order)
            throw validation_error("predict: target extrapolates along the other coordinate; "
                                   "supply coefficients fit for that ordering");
    }
    const PredictionResult res = predict(x, a, target, PredictionOptions{allow_observed});
    const json out = {{"value", res.value},
                      {"used_recursion", res.used_recursion},
                      {"zero_filled_count", res.zero_filled_count},
                      {"order", to_string(res.order_used)},
                      {"target", {target.i1, target.i2}}};
    write_text(g.output, out.dump(2) + "\n");
    return 0;
}

int cmd_ar_fit(const GlobalOpts& g, const std::string& lattice_path, const std::string& window_s) {
    const Lattice2D x = load_lattice(lattice_path);
    std::istringstream ws(window_s);
    int p[4];
    char c;
    if (!(ws >> p[0] >> c >> p[1] >> c >> p[2] >> c >> p[3]))
        throw validation_error("--window: expected pL1,pU1,pL2,pU2");
    const ARWindow w(p[0], p[1], p[2], p[3]);
    const ARFit fit = ls_fit(x, w);
    if (g.format != "csv") {  // ARFit reports as JSON by default
        json coeffs = json::array();
        const auto sup = w.support();
        for (std::size_t i = 0; i < sup.size(); ++i)
            coeffs.push_back({{"k1", sup[i].i1}, {"k2", sup[i].i2}, {"value", fit.coeffs[i]}});
        const json out = {{"window", window_to_json(w)},
                          {"coeffs", coeffs},
                          {"sigma2", fit.sigma2},
                          {"n_p", fit.n_p}};
        write_text(g.output, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os.precision(17);
        os << "pL1,pU1,pL2,pU2,sigma2,n_p\n"
           << w.pL1 << "," << w.pU1 << "," << w.pL2 << "," << w.pU2 << "," << fit.sigma2 << ","
           << fit.n_p << "\nk1,k2,value\n";
        const auto sup = w.support();
        for (std::size_t i = 0; i < sup.size(); ++i)
            os << sup[i].i1 << "," << sup[i].i2 << "," << fit.coeffs[i] << "\n";
        write_text(g.output, os.str());
    }
    return 0;
}

int cmd_order_select(const GlobalOpts& g, const std::string& lattice_path,
                     const std::string& cand_path, const std::string& crit_s) {
    // table defaults to CSV; --format json gives the structured report
    const Lattice2D x = load_lattice(lattice_path);
    std::ifstream in(cand_path);
    if (!in) throw validation_error("cannot open candidates file '" + cand_path + "'");
    std::vector<ARWindow> cands;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int p[4];
        char c;
        if (!(ls >> p[0] >> c >> p[1] >> c >> p[2] >> c >> p[3]))
            throw validation_error("candidates file: expected pL1,pU1,pL2,pU2 per line");
        cands.push_back(ARWindow(p[0], p[1], p[2], p[3]));
    }
    const OrderSelectResult res = order_select(x, cands, criterion_from_string(crit_s));
    if (g.format == "json") {
        json table = json::array();
        for (const auto& row : res.table)
            table.push_back({{"window", window_to_json(row.window)},
                             {"h", row.h},
                             {"n_p", row.n_p},
                             {"sigma2", row.sigma2},
                             {"bic", row.bic},
                             {"fpe", row.fpe}});
        const json out = {{"chosen_index", res.chosen_index},
                          {"chosen", window_to_json(res.table[res.chosen_index].window)},
                          {"criterion", crit_s},
                          {"table", table}};
        write_text(g.output, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os.precision(10);
        os << "pL1,pU1,pL2,pU2,h,n_p,sigma2,bic,fpe,chosen\n";
        for (std::size_t i = 0; i < res.table.size(); ++i) {
            const auto& row = res.table[i];
            os << row.window.pL1 << "," << row.window.pU1 << "," << row.window.pL2 << ","
               << row.window.pU2 << "," << row.h << "," << row.n_p << "," << row.sigma2 << ","
               << row.bic << "," << row.fpe << "," << (i == res.chosen_index ? 1 : 0) << "\n";
        }
        write_text(g.output, os.str());
    }
    return 0;
}

int cmd_grid(const GlobalOpts& g, const std::string& points_path, const std::string& bbox_s,
             const std::string& dims_s) {
    std::ifstream in(points_path);
    if (!in) throw validation_error("cannot open points file '" + points_path + "'");
    const auto pts = read_points_csv(in);
    double b[4];
    char c;
    std::istringstream bs(bbox_s);
    if (!(bs >> b[0] >> c >> b[1] >> c >> b[2] >> c >> b[3]))
        throw validation_error("--bbox: expected lat_min,lat_max,lon_min,lon_max");
    const auto [rows, cols] = parse_int_pair(dims_s, "--dims");
    const Lattice2D x = grid_points(pts, GridSpec(b[0], b[1], b[2], b[3], rows, cols));
    std::ostringstream os;
    os << "# rows advance with latitude from " << b[0] << "; columns advance with longitude from "
       << b[2] << "\n";
    write_lattice_csv(os, x);
    write_text(g.output, os.str());
    return 0;
}

MCConfig config_from_json(const json& j) {
    MCConfig cfg;
    if (j.contains("taus"))
        cfg.taus = j.at("taus").get<std::vector<double>>();
    else if (j.contains("tau"))
        cfg.taus = {j.at("tau").get<double>()};
    if (j.contains("nstar")) cfg.nstar = j.at("nstar").get<int>();
    if (j.contains("dist")) cfg.dist = dist_from_string(j.at("dist").get<std::string>());
    if (j.contains("bandwidths")) {
        cfg.bandwidths.clear();
        for (const auto& bw : j.at("bandwidths"))
            cfg.bandwidths.emplace_back(bw.at(0).get<int>(), bw.at(1).get<int>());
    }
    if (j.contains("ar_orders")) cfg.ar_orders = j.at("ar_orders").get<std::vector<int>>();
    if (j.contains("reps")) cfg.reps = j.at("reps").get<int>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("target_dims"))
        cfg.target_dims = GridDims(j.at("target_dims").at(0).get<int>(),
                                   j.at("target_dims").at(1).get<int>());
    if (j.contains("target_cell"))
        cfg.target_cell = Index2{j.at("target_cell").at(0).get<int>(),
                                 j.at("target_cell").at(1).get<int>()};
    if (j.contains("fixed_target")) cfg.fixed_target = j.at("fixed_target").get<bool>();
    if (j.contains("demean")) cfg.demean = j.at("demean").get<bool>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    return cfg;
}

int cmd_benchmark(const GlobalOpts& g, const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) throw validation_error("cannot open config file '" + config_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw validation_error(std::string("config JSON: ") + e.what());
    }
    MCConfig cfg = config_from_json(j);
    if (g.seed) cfg.master_seed = *g.seed;
    const RMSEReport rep = run_experiment(cfg);

    json entries = json::array();
    int total_failures = 0;
    for (const auto& e : rep.entries) {
        entries.push_back({{"predictor", e.predictor},
                           {"tau", e.tau},
                           {"m1", e.m1},
                           {"m2", e.m2},
                           {"pstar", e.pstar},
                           {"rmse", e.rmse},
                           {"reps_used", e.reps_used},
                           {"failures", e.failures}});
        total_failures += e.failures;
    }
    const json provenance = {{"master_seed", cfg.master_seed},
                             {"reps", cfg.reps},
                             {"dist", to_string(cfg.dist)},
                             {"nstar", cfg.nstar},
                             {"fixed_target", cfg.fixed_target},
                             {"estimation_dims", {rep.estimation_dims.n1, rep.estimation_dims.n2}},
                             {"spectral_dims", {rep.spectral_dims.n1, rep.spectral_dims.n2}},
                             {"total_failures", total_failures}};
    if (g.format == "json") {
        write_text(g.output, json{{"provenance", provenance}, {"entries", entries}}.dump(2) + "\n");
    } else {
        std::ostringstream os;
        write_rmse_csv(os, rep);
        os << "# provenance: " << provenance.dump() << "\n";
        write_text(g.output, os.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonparametric prediction for lattice data via cepstral spectral factorization"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--output", g.output, "Write output to a file instead of stdout");
    app.add_option("--format", g.format, "Output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    std::uint64_t seed_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "Seed / master seed override");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate the eight-neighbor MA field");
    double sim_tau = 0.05;
    std::string sim_dims = "40,41", sim_dist = "normal";
    sim->add_option("--tau", sim_tau, "MA weight, |tau| < 1/8")->required();
    sim->add_option("--dims", sim_dims, "rows,cols");
    sim->add_option("--dist", sim_dist, "normal|uniform|chisq9");

    // spectrum
    auto* spc = app.add_subcommand("spectrum", "Smoothed tapered periodogram on the coarse grid");
    std::string spc_lattice, spc_bw = "1,1";
    bool spc_nodemean = false;
    spc->add_option("--lattice", spc_lattice, "Lattice CSV")->required();
    spc->add_option("--bandwidth", spc_bw, "m1,m2")->required();
    spc->add_flag("--no-demean", spc_nodemean, "Skip sample-mean removal");

    // cepstrum
    auto* cep = app.add_subcommand("cepstrum", "Cepstral, AR, or MA coefficients");
    std::string cep_spectrum, cep_lattice, cep_bw, cep_order = "row", cep_emit = "ar";
    bool cep_nodemean = false;
    cep->add_option("--spectrum", cep_spectrum, "Spectral grid CSV");
    cep->add_option("--lattice", cep_lattice, "Lattice CSV (alternative input)");
    cep->add_option("--bandwidth", cep_bw, "m1,m2 (with --lattice)");
    cep->add_option("--order", cep_order, "row|col")->check(CLI::IsMember({"row", "col"}));
    cep->add_option("--emit", cep_emit, "alpha|ar|ma")->check(CLI::IsMember({"alpha", "ar", "ma"}));
    cep->add_flag("--no-demean", cep_nodemean, "Skip sample-mean removal");

    // predict
    auto* prd = app.add_subcommand("predict", "One-step prediction at a target cell");
    std::string prd_lattice, prd_coeffs, prd_target, prd_order = "auto";
    bool prd_allow = false;
    prd->add_option("--lattice", prd_lattice, "Lattice CSV")->required();
    prd->add_option("--coeffs", prd_coeffs, "AR coefficient CSV")->required();
    prd->add_option("--target", prd_target, "r,c")->required();
    prd->add_option("--order", prd_order, "row|col|auto")
        ->check(CLI::IsMember({"row", "col", "auto"}));
    prd->add_flag("--allow-observed", prd_allow, "Predict an observed cell (validation studies)");

    // ar-fit
    auto* arf = app.add_subcommand("ar-fit", "Truncated half-plane autoregression by least squares");
    std::string arf_lattice, arf_window;
    arf->add_option("--lattice", arf_lattice, "Lattice CSV")->required();
    arf->add_option("--window", arf_window, "pL1,pU1,pL2,pU2")->required();

    // order-select
    auto* ords = app.add_subcommand("order-select", "BIC/FPE over a candidate window list");
    std::string ord_lattice, ord_cands, ord_crit = "bic";
    ords->add_option("--lattice", ord_lattice, "Lattice CSV")->required();
    ords->add_option("--candidates", ord_cands, "File of pL1,pU1,pL2,pU2 lines")->required();
    ords->add_option("--criterion", ord_crit, "bic|fpe")->check(CLI::IsMember({"bic", "fpe"}));

    // grid
    auto* grd = app.add_subcommand("grid", "Aggregate point records onto a lattice");
    std::string grd_points, grd_bbox, grd_dims;
    grd->add_option("--points", grd_points, "Points CSV (lat,lon,value)")->required();
    grd->add_option("--bbox", grd_bbox, "lat_min,lat_max,lon_min,lon_max")->required();
    grd->add_option("--dims", grd_dims, "rows,cols")->required();

    // benchmark
    auto* bch = app.add_subcommand("benchmark", "Monte Carlo RMSE experiment");
    std::string bch_config;
    bch->add_option("--config", bch_config, "Experiment config JSON")->required();

    // global options (--seed/--output/--format) may follow the subcommand
    for (CLI::App* sc : {sim, spc, cep, prd, arf, ords, grd, bch}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (seed_opt->count() > 0) g.seed = seed_val;

    try {
        if (sim->parsed()) return cmd_simulate(g, sim_tau, sim_dims, sim_dist);
        if (spc->parsed()) return cmd_spectrum(g, spc_lattice, spc_bw, spc_nodemean);
        if (cep->parsed())
            return cmd_cepstrum(g, cep_spectrum, cep_lattice, cep_bw, cep_order, cep_emit,
                                cep_nodemean);
        if (prd->parsed()) return cmd_predict(g, prd_lattice, prd_coeffs, prd_target, prd_order, prd_allow);
        if (arf->parsed()) return cmd_ar_fit(g, arf_lattice, arf_window);
        if (ords->parsed()) return cmd_order_select(g, ord_lattice, ord_cands, ord_crit);
        if (grd->parsed()) return cmd_grid(g, grd_points, grd_bbox, grd_dims);
        if (bch->parsed()) return cmd_benchmark(g, bch_config);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
