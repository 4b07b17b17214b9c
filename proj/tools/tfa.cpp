// Command-line front end. Every subcommand reads an optional config file
// (key=value lines or a flat JSON object), lets flags override it, derives
// all randomness from one master seed, writes its tables under --out, and
// drops a run manifest next to them. Exit codes: 0 success, 1 validation
// error, 2 a numerical check failed.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfa/dyadic.hpp"
#include "tfa/experiments.hpp"
#include "tfa/fourier_coeff.hpp"
#include "tfa/maximal.hpp"
#include "tfa/multiplier.hpp"
#include "tfa/rng.hpp"
#include "tfa/symbol.hpp"
#include "tfa/tilenorms.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using ConfigMap = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// key=value lines, '#' comments; a .json file may hold a flat object instead
ConfigMap load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    ConfigMap out;
    std::string lead = trim(text);
    if (!lead.empty() && lead[0] == '{') {
        auto j = nlohmann::json::parse(text);
        for (auto& [k, v] : j.items()) {
            if (v.is_string())
                out[k] = v.get<std::string>();
            else
                out[k] = v.dump();
        }
        return out;
    }
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " +
                                        std::to_string(lineno) +
                                        " is not key=value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config: empty key on line " +
                                        std::to_string(lineno));
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": " + v);
    }
}

long long to_ll(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long n = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": " +
                                    v);
    }
}

// Effective settings: defaults, overlaid by the config file, overlaid by
// flags. Everything the run depends on ends up in the map so that the
// manifest hash covers it.
struct Settings {
    ConfigMap values;

    double d(const std::string& k) const { return to_double(k, values.at(k)); }
    long long i(const std::string& k) const { return to_ll(k, values.at(k)); }
    bool b(const std::string& k) const {
        const std::string& v = values.at(k);
        if (v == "1" || v == "true") return true;
        if (v == "0" || v == "false") return false;
        throw std::invalid_argument("config: bad bool for " + k + ": " + v);
    }
    std::vector<long long> ilist(const std::string& k) const {
        std::vector<long long> out;
        std::istringstream ss(values.at(k));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(to_ll(k, item));
        }
        return out;
    }
    std::vector<double> dlist(const std::string& k) const {
        std::vector<double> out;
        std::istringstream ss(values.at(k));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(to_double(k, item));
        }
        return out;
    }
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Run context shared by the subcommands: resolved settings, output
// directory, and the manifest bookkeeping.
struct Run {
    std::string subcommand;
    Settings cfg;
    std::filesystem::path out_dir;
    std::string started = iso_now();
    std::vector<std::string> outputs;

    void write(const std::string& name, const std::string& content) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + name);
        f << content;
        outputs.push_back(name);
    }

    std::string config_hash() const {
        std::string canon = subcommand;
        for (const auto& [k, v] : cfg.values) canon += "\n" + k + "=" + v;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a(canon)));
        return buf;
    }

    void write_manifest() {
        nlohmann::json m;
        m["tool_version"] = kToolVersion;
        m["subcommand"] = subcommand;
        m["config"] = cfg.values;
        m["config_hash"] = config_hash();
        m["seed"] = cfg.i("seed");
        m["started"] = started;
        m["finished"] = iso_now();
        m["outputs"] = outputs;
        std::filesystem::create_directories(out_dir);
        std::ofstream f(out_dir / (subcommand + "_manifest.json"),
                        std::ios::binary);
        f << m.dump(2) << "\n";
    }
};

// flag plumbing: every subcommand option is declared once with its default;
// values given on the command line win over the config file
struct FlagSet {
    struct Entry {
        std::string key, value;
        CLI::Option* opt = nullptr;
    };

    CLI::App* app;
    std::deque<Entry> values;
    std::string config_path, out_dir = ".";

    explicit FlagSet(CLI::App* a) : app(a) {
        app->add_option("--config", config_path, "key=value or JSON config");
        app->add_option("--out", out_dir, "output directory");
        add("seed", "1", "--seed", "master seed");
        add("threads", "1", "--threads", "worker threads");
        add("format", "csv", "--format", "csv or json");
    }

    void add(const std::string& key, const std::string& def,
             const std::string& flag, const std::string& help) {
        values.push_back({key, def, nullptr});
        values.back().opt = app->add_option(flag, values.back().value, help);
    }

    Run resolve(const std::string& subcommand) const {
        Run run;
        run.subcommand = subcommand;
        run.out_dir = out_dir;
        ConfigMap file;
        if (!config_path.empty()) file = load_config(config_path);
        for (const auto& e : values) {
            if (e.opt->count() == 0 && file.count(e.key))
                run.cfg.values[e.key] = file[e.key];
            else
                run.cfg.values[e.key] = e.value;
            file.erase(e.key);
        }
        if (!file.empty())
            throw std::invalid_argument("config: unknown key " +
                                        file.begin()->first);
        const std::string& f = run.cfg.values.at("format");
        if (f != "csv" && f != "json")
            throw std::invalid_argument("format must be csv or json");
        return run;
    }
};

// ---------------------------------------------------------------- symbol-table

int cmd_symbol_table(const FlagSet& flags) {
    Run run = flags.resolve("symbol-table");
    tfa::SymbolParams params(run.cfg.d("beta"));
    long long s1 = run.cfg.i("steps1"), s2 = run.cfg.i("steps2"),
              s3 = run.cfg.i("steps3");
    double lo = run.cfg.d("grid_min"), hi = run.cfg.d("grid_max");
    if (s1 < 1 || s2 < 1 || s3 < 1)
        throw std::invalid_argument("grid steps must be >= 1");
    if (!(hi >= lo)) throw std::invalid_argument("grid_max < grid_min");
    bool exclude = run.cfg.b("exclude_singular");

    auto coord = [&](long long s, long long steps) {
        return steps == 1 ? lo : lo + double(s) * (hi - lo) / double(steps - 1);
    };
    std::string csv = "xi1,xi2,xi3,m_plus,m_sgn\n";
    nlohmann::json rows = nlohmann::json::array();
    for (long long a = 0; a < s1; ++a)
        for (long long b = 0; b < s2; ++b)
            for (long long c = 0; c < s3; ++c) {
                tfa::FrequencyTriple xi{coord(a, s1), coord(b, s2),
                                        coord(c, s3)};
                if (exclude && xi.xi1 == 0 &&
                    std::abs(params.beta * xi.xi2 + xi.xi3) <= 1e-12)
                    continue;
                double mp = tfa::m_plus(params, xi);
                double ms = tfa::m_sgn(params, xi);
                csv += fmt(xi.xi1) + "," + fmt(xi.xi2) + "," + fmt(xi.xi3) +
                       "," + fmt(mp) + "," + fmt(ms) + "\n";
                rows.push_back({{"xi1", xi.xi1},
                                {"xi2", xi.xi2},
                                {"xi3", xi.xi3},
                                {"m_plus", mp},
                                {"m_sgn", ms}});
            }
    if (run.cfg.values.at("format") == "json")
        run.write("symbol_table.json", rows.dump(2) + "\n");
    else
        run.write("symbol_table.csv", csv);
    run.write_manifest();
    return 0;
}

// ---------------------------------------------------------------- coeff-decay

int cmd_coeff_decay(const FlagSet& flags) {
    Run run = flags.resolve("coeff-decay");
    double beta = run.cfg.d("beta");
    auto cases = run.cfg.ilist("cases");
    if (cases.empty()) throw std::invalid_argument("cases list is empty");
    int slo = int(run.cfg.i("scale_lo")), shi = int(run.cfg.i("scale_hi"));
    if (shi < slo) throw std::invalid_argument("scale_hi < scale_lo");
    long long nmax = run.cfg.i("nmax");
    if (nmax < 0) throw std::invalid_argument("nmax must be >= 0");
    std::uint64_t seed = std::uint64_t(run.cfg.i("seed"));

    std::vector<tfa::CaseCollection> sample;
    for (long long cid : cases) {
        if (cid < 1 || cid > 3)
            throw std::invalid_argument("case id must be 1, 2 or 3");
        sample.push_back(tfa::generate_case_collection(
            int(cid), beta, slo, shi, int(run.cfg.i("positions")),
            seed + std::uint64_t(cid)));
    }
    std::vector<std::array<int, 3>> ngrid{{0, 0, 0}};
    for (int n = 1; n <= nmax; ++n) {
        ngrid.push_back({n, 0, 0});
        ngrid.push_back({0, n, 0});
        ngrid.push_back({0, 0, n});
    }
    auto report = tfa::verify_decay(sample, ngrid, beta, {},
                                    int(run.cfg.i("threads")));
    if (run.cfg.values.at("format") == "json") {
        nlohmann::json j;
        j["K"] = report.K;
        for (auto& [c, k] : report.K_by_case)
            j["K_by_case"][std::to_string(c)] = k;
        for (auto& [s, k] : report.K_by_scale)
            j["K_by_scale"][std::to_string(s)] = k;
        j["records"] = nlohmann::json::array();
        for (const auto& r : report.records)
            j["records"].push_back({{"case_id", r.case_id},
                                    {"scale", r.scale},
                                    {"n1", r.n1},
                                    {"n2", r.n2},
                                    {"n3", r.n3},
                                    {"abs_c", r.abs_c},
                                    {"envelope", r.envelope},
                                    {"ratio", r.ratio}});
        run.write("coeff_decay.json", j.dump(2) + "\n");
    } else {
        run.write("coeff_decay.csv", tfa::decay_report_csv(report));
    }
    run.write_manifest();
    return 0;
}

// ----------------------------------------------------------------- norm-sweep

int cmd_norm_sweep(const FlagSet& flags) {
    Run run = flags.resolve("norm-sweep");
    tfa::SweepConfig sweep;
    sweep.p1 = run.cfg.d("p1");
    sweep.p2 = run.cfg.d("p2");
    sweep.p3 = run.cfg.d("p3");
    sweep.beta = run.cfg.d("beta");
    sweep.trials = int(run.cfg.i("trials"));
    sweep.kmax = int(run.cfg.i("kmax"));
    sweep.grid_n = std::size_t(run.cfg.i("grid_n"));
    sweep.period = run.cfg.d("period");
    sweep.seed = std::uint64_t(run.cfg.i("seed"));
    sweep.threads = int(run.cfg.i("threads"));
    if (sweep.trials < 1) throw std::invalid_argument("trials must be >= 1");

    auto gate = tfa::validate_exponents(sweep.p1, sweep.p2, sweep.p3);
    if (!gate.accepted)
        throw std::invalid_argument("exponent triple rejected by the gate");

    auto records = tfa::holder_ratio_sweep(sweep);
    std::string csv = "trial,seed,p1,p2,p3,p,beta,modes,ratio\n";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : records) {
        char head[64];
        std::snprintf(head, sizeof head, "%d,%llu,", r.trial,
                      static_cast<unsigned long long>(r.seed));
        csv += std::string(head) + fmt(r.p1) + "," + fmt(r.p2) + "," +
               fmt(r.p3) + "," + fmt(r.p) + "," + fmt(r.beta) + "," +
               std::to_string(r.modes) + "," + fmt(r.ratio) + "\n";
        rows.push_back({{"trial", r.trial},
                        {"seed", r.seed},
                        {"p", r.p},
                        {"modes", r.modes},
                        {"ratio", r.ratio}});
    }
    if (run.cfg.values.at("format") == "json")
        run.write("norm_sweep.json", rows.dump(2) + "\n");
    else
        run.write("norm_sweep.csv", csv);

    int rc = 0;
    long long dilate = run.cfg.i("dilate");
    if (dilate < 0) throw std::invalid_argument("dilate must be >= 0");
    if (dilate > 1) {
        // the ratio is invariant under mode dilation; check one instance
        tfa::SymbolParams params(sweep.beta);
        tfa::Rng rng = tfa::Rng::derive(sweep.seed, 9001);
        auto f1 = tfa::random_bandlimited(rng, 4, sweep.period, false);
        auto f2 = tfa::random_bandlimited(rng, 4, sweep.period, false);
        auto f3 = tfa::random_bandlimited(rng, 4, sweep.period, false);
        auto ratio_of = [&](const tfa::BandlimitedFn& a,
                            const tfa::BandlimitedFn& b,
                            const tfa::BandlimitedFn& c) {
            auto out = tfa::apply_tilde(params, a, b, c);
            return tfa::lp_norm(tfa::sample(out, 1024), gate.p) /
                   (tfa::lp_norm(tfa::sample(a, 1024), sweep.p1) *
                    tfa::lp_norm(tfa::sample(b, 1024), sweep.p2) *
                    tfa::lp_norm(tfa::sample(c, 1024), sweep.p3));
        };
        double r0 = ratio_of(f1, f2, f3);
        double rm = ratio_of(tfa::dilate_modes(f1, int(dilate)),
                             tfa::dilate_modes(f2, int(dilate)),
                             tfa::dilate_modes(f3, int(dilate)));
        if (std::abs(rm - r0) > 1e-6 * std::abs(r0)) {
            std::fprintf(stderr,
                         "dilation invariance violated: %.17g vs %.17g\n", r0,
                         rm);
            rc = 2;
        }
    }
    run.write_manifest();
    return rc;
}

// --------------------------------------------------------------- maximal-test

int cmd_maximal_test(const FlagSet& flags) {
    Run run = flags.resolve("maximal-test");
    tfa::DyadicGridFn f;
    f.J = int(run.cfg.i("grid_J"));
    f.lo = run.cfg.i("domain_lo");
    f.hi = run.cfg.i("domain_hi");
    if (f.hi <= f.lo) throw std::invalid_argument("empty grid domain");
    f.values.assign(std::size_t(f.cells()), 0);
    tfa::Rng rng = tfa::Rng::derive(std::uint64_t(run.cfg.i("seed")), 1);
    for (auto& v : f.values) v = double(rng.uniform_int(0, 4));
    tfa::validate_grid_fn(f);

    auto shifts = run.cfg.ilist("n_list");
    if (shifts.empty()) throw std::invalid_argument("n_list is empty");
    double sup = *std::max_element(f.values.begin(), f.values.end());
    if (sup <= 0) throw std::invalid_argument("input function vanishes");
    std::vector<double> lambdas;
    for (double q : {0.1, 0.2, 0.4, 0.6, 0.8}) lambdas.push_back(q * sup);

    int rc = 0;
    std::vector<tfa::WeakTypeRow> rows;
    nlohmann::json summary = nlohmann::json::array();
    for (long long n : shifts) {
        auto rep = tfa::weak_type_test(f, n, lambdas);
        rows.insert(rows.end(), rep.rows.begin(), rep.rows.end());
        auto cov = tfa::covering_report(f, n, 0.4 * sup);
        double fitted = rep.max_ratio / std::log2(2.0 + double(std::llabs(n)));
        summary.push_back({{"n", n},
                           {"max_ratio", rep.max_ratio},
                           {"fitted", fitted},
                           {"covered", cov.covered},
                           {"intervals", cov.interval_count},
                           {"friends", cov.friend_count}});
        if (!cov.covered) {
            std::fprintf(stderr, "covering check failed at n = %lld\n", n);
            rc = 2;
        }
    }
    if (run.cfg.values.at("format") == "json") {
        nlohmann::json j;
        j["summary"] = summary;
        j["rows"] = nlohmann::json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"n", r.n},
                                 {"lambda", r.lambda},
                                 {"measure_sharp", r.measure_sharp},
                                 {"measure_hl", r.measure_hl},
                                 {"ratio", r.ratio}});
        run.write("maximal_test.json", j.dump(2) + "\n");
    } else {
        run.write("maximal_test.csv", tfa::weak_type_csv(rows));
    }
    run.write_manifest();
    return rc;
}

// -------------------------------------------------------------- tilenorm-test

std::vector<tfa::QuadTile> build_collection(double beta, int slo, int shi,
                                            std::size_t want,
                                            std::uint64_t seed) {
    std::vector<tfa::QuadTile> out;
    for (std::uint64_t s = 0; out.size() < want && s < 256; ++s) {
        auto coll = tfa::generate_case_collection(int(s % 3) + 1, beta, slo,
                                                  shi, 2, seed + s);
        out.insert(out.end(), coll.quadtiles.begin(), coll.quadtiles.end());
    }
    if (out.size() < want)
        throw std::invalid_argument("could not generate enough quadtiles");
    out.resize(want);
    return out;
}

int cmd_tilenorm_test(const FlagSet& flags) {
    Run run = flags.resolve("tilenorm-test");
    long long count = run.cfg.i("tile_count");
    if (count < 1) throw std::invalid_argument("tile_count must be >= 1");
    int j = int(run.cfg.i("position"));
    if (j < 1 || j > 4) throw std::invalid_argument("position must be 1..4");
    auto coll = build_collection(
        run.cfg.d("beta"), int(run.cfg.i("scale_lo")),
        int(run.cfg.i("scale_hi")), std::size_t(count),
        std::uint64_t(run.cfg.i("seed")));
    tfa::Rng rng = tfa::Rng::derive(std::uint64_t(run.cfg.i("seed")), 2);
    tfa::CoefficientSequence coeffs;
    for (std::size_t p = 0; p < coll.size(); ++p)
        for (int jj = 1; jj <= 4; ++jj)
            coeffs.set(p, jj,
                       tfa::Cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)));

    auto s = tfa::size_energy_decompose(coeffs, coll, j);
    int rc = 0;
    for (const auto& [n, st] : s.strata) {
        double cap = std::min(std::ldexp(s.total_energy, -n), s.total_size);
        if (st.size_bound > cap + 1e-9) {
            std::fprintf(stderr, "stratum %d exceeds its size cap\n", n);
            rc = 2;
        }
    }
    run.write("tilenorm_test.json", tfa::stratification_json(s) + "\n");
    run.write_manifest();
    return rc;
}

// ------------------------------------------------------------------------ rwt

int cmd_rwt(const FlagSet& flags) {
    Run run = flags.resolve("rwt");
    tfa::ExperimentConfig cfg;
    cfg.seed = std::uint64_t(run.cfg.i("seed"));
    cfg.beta = run.cfg.d("beta");
    cfg.scale_lo = int(run.cfg.i("scale_lo"));
    cfg.scale_hi = int(run.cfg.i("scale_hi"));
    long long count = run.cfg.i("tile_count");
    if (count < 1) throw std::invalid_argument("tile_count must be >= 1");
    cfg.tile_count = std::size_t(count);
    auto shifts = run.cfg.ilist("shifts");
    auto gammas = run.cfg.dlist("gammas");
    if (shifts.size() != 3) throw std::invalid_argument("need three shifts");
    if (gammas.size() != 3) throw std::invalid_argument("need three gammas");
    std::copy(shifts.begin(), shifts.end(), cfg.shifts.begin());
    std::copy(gammas.begin(), gammas.end(), cfg.gammas.begin());
    cfg.C_init = run.cfg.d("C_init");
    cfg.grid_J = int(run.cfg.i("grid_J"));
    cfg.period = run.cfg.i("period");
    cfg.set_parts = int(run.cfg.i("set_parts"));
    cfg.random_phases = run.cfg.b("random_phases");

    auto rep = tfa::rwt_experiment(cfg);
    int rc = 0;
    if (rep.e4_prime_measure < 0.5 * rep.e4_measure) {
        std::fprintf(stderr, "exceptional set removed over half of E4\n");
        rc = 2;
    }
    if (rep.recombine_error > 1e-10) {
        std::fprintf(stderr, "stratum sums do not recombine to the total\n");
        rc = 2;
    }
    if (run.cfg.values.at("format") == "json") {
        run.write("rwt.json", tfa::rwt_json(cfg, rep));
    } else {
        std::string summary = "key,value\n";
        summary += "omega_measure," + fmt(rep.omega_measure) + "\n";
        summary += "C_used," + fmt(rep.C_used) + "\n";
        summary += "e4_measure," + fmt(rep.e4_measure) + "\n";
        summary += "e4_prime_measure," + fmt(rep.e4_prime_measure) + "\n";
        summary += "total_abs," + fmt(std::abs(rep.total)) + "\n";
        summary += "recombine_error," + fmt(rep.recombine_error) + "\n";
        summary += "envelope," + fmt(rep.envelope) + "\n";
        summary += "bound_ratio," + fmt(rep.bound_ratio) + "\n";
        run.write("rwt_summary.csv", summary);
        std::string strata = "d,abs,re,im\n";
        for (const auto& [d, v] : rep.stratum_sums)
            strata += std::to_string(d) + "," + fmt(std::abs(v)) + "," +
                      fmt(v.real()) + "," + fmt(v.imag()) + "\n";
        run.write("rwt_strata.csv", strata);
    }
    run.write_manifest();
    return rc;
}

// -------------------------------------------------------------- identity-check

int cmd_identity_check(const FlagSet& flags) {
    Run run = flags.resolve("identity-check");
    tfa::DeltaIdentityProbe probe{tfa::SymbolParams(run.cfg.d("beta")),
                                  run.cfg.d("xi1"),
                                  run.cfg.d("xi2"),
                                  run.cfg.d("xi3"),
                                  tfa::BumpFn{-0.4, 3.0},
                                  tfa::BumpFn{0.2, 3.0},
                                  int(run.cfg.i("quad_panels"))};
    auto widths = run.cfg.dlist("widths");
    if (widths.empty()) throw std::invalid_argument("widths list is empty");
    for (double w : widths)
        if (!(w > 0)) throw std::invalid_argument("widths must be positive");
    std::sort(widths.begin(), widths.end(), std::greater<>());

    const char* names = "abcdef";
    std::string csv = "identity,width,residual\n";
    int rc = 0;
    for (int id = 0; id < 6; ++id) {
        double prev = 1e300;
        for (double w : widths) {
            double r = tfa::verify_delta_identity(
                static_cast<tfa::DeltaIdentity>(id), probe, w);
            csv += std::string(1, names[id]) + "," + fmt(w) + "," + fmt(r) +
                   "\n";
            if (r > prev + 1e-12) {
                std::fprintf(stderr,
                             "identity %c residual grew under refinement\n",
                             names[id]);
                rc = 2;
            }
            prev = r;
        }
        if (prev > 1e-4) {
            std::fprintf(stderr, "identity %c residual too large: %.3g\n",
                         names[id], prev);
            rc = 2;
        }
    }
    run.write("identity_check.csv", csv);
    run.write_manifest();
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit driver"};
    app.require_subcommand(1);

    auto* sym = app.add_subcommand("symbol-table",
                                   "tabulate the averaged symbol on a grid");
    FlagSet sym_flags(sym);
    sym_flags.add("beta", "2", "--beta", "operator parameter");
    sym_flags.add("grid_min", "-1", "--grid-min", "axis minimum");
    sym_flags.add("grid_max", "1", "--grid-max", "axis maximum");
    sym_flags.add("steps1", "3", "--steps1", "xi1 grid points");
    sym_flags.add("steps2", "3", "--steps2", "xi2 grid points");
    sym_flags.add("steps3", "3", "--steps3", "xi3 grid points");
    sym_flags.add("exclude_singular", "0", "--exclude-singular",
                  "drop rows on the singular line xi1 = 0, beta xi2 + xi3 = 0");

    auto* dec = app.add_subcommand("coeff-decay",
                                   "coefficient decay report over a sample");
    FlagSet dec_flags(dec);
    dec_flags.add("beta", "2", "--beta", "operator parameter");
    dec_flags.add("cases", "1,2,3", "--cases", "case ids");
    dec_flags.add("scale_lo", "-1", "--scale-lo", "finest scale exponent");
    dec_flags.add("scale_hi", "1", "--scale-hi", "coarsest scale exponent");
    dec_flags.add("positions", "1", "--positions", "positions per scale");
    dec_flags.add("nmax", "1", "--nmax", "max modulation index per axis");

    auto* nrm = app.add_subcommand("norm-sweep", "Holder ratio sweep");
    FlagSet nrm_flags(nrm);
    nrm_flags.add("p1", "4", "--p1", "first exponent");
    nrm_flags.add("p2", "4", "--p2", "second exponent");
    nrm_flags.add("p3", "4", "--p3", "third exponent");
    nrm_flags.add("beta", "2", "--beta", "operator parameter");
    nrm_flags.add("trials", "20", "--trials", "random trials");
    nrm_flags.add("kmax", "8", "--kmax", "mode cutoff");
    nrm_flags.add("grid_n", "256", "--grid-n", "norm sampling grid");
    nrm_flags.add("period", "1", "--period", "torus period");
    nrm_flags.add("dilate", "0", "--dilate",
                  "also check ratio invariance under this mode dilation");

    auto* mx = app.add_subcommand("maximal-test",
                                  "shifted maximal weak type battery");
    FlagSet mx_flags(mx);
    mx_flags.add("grid_J", "5", "--grid-J", "finest scale exponent");
    mx_flags.add("domain_lo", "0", "--domain-lo", "domain start (integer)");
    mx_flags.add("domain_hi", "4", "--domain-hi", "domain end (integer)");
    mx_flags.add("n_list", "1,2,4,8,16", "--n-list", "shifts to test");

    auto* tn = app.add_subcommand("tilenorm-test",
                                  "size-energy stratification report");
    FlagSet tn_flags(tn);
    tn_flags.add("beta", "2", "--beta", "operator parameter");
    tn_flags.add("scale_lo", "0", "--scale-lo", "finest tile scale");
    tn_flags.add("scale_hi", "3", "--scale-hi", "coarsest tile scale");
    tn_flags.add("tile_count", "40", "--tile-count", "collection size");
    tn_flags.add("position", "3", "--position", "position j to stratify");

    auto* rwt = app.add_subcommand("rwt", "restricted weak type pipeline");
    FlagSet rwt_flags(rwt);
    rwt_flags.add("beta", "2", "--beta", "operator parameter");
    rwt_flags.add("scale_lo", "0", "--scale-lo", "finest tile scale");
    rwt_flags.add("scale_hi", "3", "--scale-hi", "coarsest tile scale");
    rwt_flags.add("tile_count", "12", "--tile-count", "collection size");
    rwt_flags.add("shifts", "3,0,0", "--shifts", "three shift indices");
    rwt_flags.add("gammas", "0.9,0.45,0.9", "--gammas",
                  "set-size exponents (first/third in (0,1), second in (0,1/2))");
    rwt_flags.add("C_init", "8", "--C-init", "exceptional threshold constant");
    rwt_flags.add("grid_J", "5", "--grid-J", "set resolution");
    rwt_flags.add("period", "4", "--period", "sets live on [0, period)");
    rwt_flags.add("set_parts", "16", "--set-parts",
                  "max intervals per random set");
    rwt_flags.add("random_phases", "0", "--random-phases",
                  "perturb indicators by unit phases");

    auto* idc = app.add_subcommand("identity-check",
                                   "distributional identity residuals");
    FlagSet idc_flags(idc);
    idc_flags.add("beta", "2", "--beta", "operator parameter");
    idc_flags.add("xi1", "1", "--xi1", "fixed first frequency");
    idc_flags.add("xi2", "0.25", "--xi2", "fixed second frequency");
    idc_flags.add("xi3", "-0.5", "--xi3", "fixed third frequency");
    idc_flags.add("widths", "0.1,0.05,0.025", "--widths", "mollifier widths");
    idc_flags.add("quad_panels", "64", "--quad-panels",
                  "quadrature panels per axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        if (sym->parsed()) return cmd_symbol_table(sym_flags);
        if (dec->parsed()) return cmd_coeff_decay(dec_flags);
        if (nrm->parsed()) return cmd_norm_sweep(nrm_flags);
        if (mx->parsed()) return cmd_maximal_test(mx_flags);
        if (tn->parsed()) return cmd_tilenorm_test(tn_flags);
        if (rwt->parsed()) return cmd_rwt(rwt_flags);
        if (idc->parsed()) return cmd_identity_check(idc_flags);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 1;
}
