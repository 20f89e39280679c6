// drwcli: de Rham-Witt, Cartier, monodromy, Koszul and comparison reports for monomial charts.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "drw/ainf_koszul.hpp"
#include "drw/witt.hpp"
#include "json.hpp"

using namespace drw;
using nlohmann::json;

namespace {

constexpr int kMaxPrime = 5;
constexpr int kMaxLevel = 3;
constexpr i64 kMaxDegree = 16;
constexpr const char* kSchemaVersion = "1";

struct RunConfig {
    std::string command;
    std::string chart_path;
    std::optional<int> prime;
    int level = 1;
    i64 degree_bound = 2;
    i64 laurent_bound = 1;
    std::string format = "table";
    u64 seed = 0;
    std::string out;
};

struct Report {
    json j;
    std::ostringstream table;
    bool pass = true;

    void check(const std::string& name, bool ok, const std::string& witness = {}) {
        json c = {{"name", name}, {"pass", ok}};
        if (!ok && !witness.empty()) c["witness"] = witness;
        j["checks"].push_back(c);
        pass = pass && ok;
    }
};

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// exponent -> multiplicity, in increasing order
json divisor_counts(const std::vector<int>& exps) {
    std::map<int, long> m;
    for (int e : exps) ++m[e];
    json out = json::array();
    for (const auto& [e, c] : m) out.push_back({{"exponent", e}, {"count", c}});
    return out;
}

std::string divisor_text(const std::vector<int>& exps, int p) {
    std::map<int, long> m;
    for (int e : exps) ++m[e];
    if (m.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : m) {
        if (!first) os << " + ";
        first = false;
        os << "(Z/" << p;
        if (e > 1) os << "^" << e;
        os << ")^" << c;
    }
    return os.str();
}

json sparse(const Matrix& m) {
    json e = json::array();
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            if (m(i, j)) e.push_back({i, j, m(i, j)});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", e}};
}

std::string chart_text(const LogChart& c) {
    std::ostringstream os;
    for (const auto& b : c.blocks()) {
        os << "{";
        for (size_t i = 0; i < b.size(); ++i) os << (i ? "," : "") << b[i];
        os << "}";
    }
    for (const auto& s : c.smooth()) os << "{" << s.name << (s.laurent ? " laurent" : "") << "}";
    os << " p=" << c.p();
    return os.str();
}

void header(Report& R, const RunConfig& cfg, const LogChart* c) {
    R.j = json::object();
    R.j["schema"] = kSchemaVersion;
    R.j["command"] = cfg.command;
    R.j["level"] = cfg.level;
    R.j["degree_bound"] = cfg.degree_bound;
    R.j["laurent_bound"] = cfg.laurent_bound;
    R.j["seed"] = cfg.seed;
    R.j["checks"] = json::array();
    if (c) {
        R.j["chart"] = c->to_json();
        R.j["prime"] = c->p();
        R.table << cfg.command << "  " << chart_text(*c) << "  r=" << cfg.level << " D=" << cfg.degree_bound
                << " L=" << cfg.laurent_bound << "\n";
    }
}

void tower_checks(Report& R, const TowerReport& t, const std::string& prefix) {
    for (const auto& a : t.axioms) R.check(prefix + a.name, a.pass, a.witness);
}

// per level and degree, divisors of the tower summed over the weights of that level
json tower_table(Report& R, const GradedTower& T, int rmax) {
    json levels = json::array();
    const int p = T.p();
    for (int r = 1; r <= rmax; ++r) {
        json lv = {{"level", r}, {"degrees", json::array()}};
        R.table << "level " << r << "\n";
        const auto ws = T.weights(r);
        for (int i = 0; i <= T.top(); ++i) {
            std::vector<int> all;
            for (const auto& k : ws)
                for (int e : T.piece(r, k, i).divisors()) all.push_back(e);
            lv["degrees"].push_back({{"degree", i}, {"weights", ws.size()}, {"divisors", divisor_counts(all)}});
            R.table << "  degree " << i << "  " << divisor_text(all, p) << "\n";
        }
        levels.push_back(lv);
    }
    return levels;
}

// ---- commands ----

void cmd_drw(Report& R, const RunConfig& cfg, const LogChart& c) {
    DRWTower T(c, LogBase::Standard, cfg.level, cfg.degree_bound, cfg.laurent_bound);
    R.j["levels"] = tower_table(R, T, cfg.level);

    // W_1 against omega over the same window
    OmegaBuild om = build_omega(c, LogBase::Standard, cfg.degree_bound, cfg.laurent_bound);
    bool ranks_ok = true;
    std::string w;
    json omega = json::array();
    for (int i = 0; i <= T.top(); ++i) {
        const int rk = om.modules.at(static_cast<size_t>(i)).presentation().log_order();
        long w1 = 0;
        for (const auto& k : T.weights(1)) w1 += T.piece(1, k, i).log_order();
        omega.push_back({{"degree", i}, {"rank", rk}});
        if (w1 != rk) {
            ranks_ok = false;
            if (w.empty()) w = "degree " + std::to_string(i) + ": |W_1| = p^" + std::to_string(w1) + ", |omega| = p^" + std::to_string(rk);
        }
    }
    R.j["omega"] = omega;
    R.check("W_1 ranks match omega", ranks_ok, w);
    if (om.general_path_checked) R.check("omega general path", om.general_path_agrees, om.mismatch);

    json maps = json::array();
    for (const auto& k : T.weights(cfg.level)) {
        ComplexLevel L = T.level_complex(cfg.level, k);
        for (int i = 0; i < T.top(); ++i) {
            Matrix m = L.d_matrix(i);
            if (m.rows() == 0 || m.cols() == 0) continue;
            maps.push_back({{"name", "d"}, {"level", cfg.level}, {"weight", weight_label(c, k)}, {"degree", i},
                            {"matrix", sparse(m)}});
        }
    }
    R.j["maps"] = maps;

    CheckResult nu = nu_bijection_check(T, cfg.degree_bound);
    R.check("nu bijective", nu.pass, nu.witness);
    for (int r = 2; r <= cfg.level; ++r) {
        CheckResult mp = mod_p_comparison_check(T, r);
        R.check("mod p comparison r=" + std::to_string(r), mp.pass, mp.witness);
    }
    for (int r = 1; r < cfg.level; ++r) {
        AxiomResult f = fil_exactness_check(T, r);
        R.check("Fil exactness r=" + std::to_string(r), f.pass, f.witness);
    }
    tower_checks(R, dieudonne_tower_check(T), "");
    TowerCheckOptions opt;
    opt.product_degree_bound = 2;
    tower_checks(R, fv_procomplex_check(T, T.log_data(), opt), "");
}

void cmd_cartier(Report& R, const RunConfig& cfg, const LogChart& c) {
    CartierReport ci = cartier_inverse_check(c, LogBase::Standard, cfg.degree_bound, cfg.laurent_bound);
    R.j["cartier_inverse"] = {{"weights", ci.weights_checked}, {"cocycles", ci.cocycles}, {"bijective", ci.bijective}};
    R.table << "C^-1 on omega: weights " << ci.weights_checked << "  cocycles " << (ci.cocycles ? "yes" : "no")
            << "  bijective " << (ci.bijective ? "yes" : "no") << "\n";
    R.check("C^-1 cocycles", ci.cocycles, ci.witness);
    R.check("C^-1 bijective", ci.bijective, ci.witness);
    DRWTower T(c, LogBase::Standard, cfg.level, cfg.degree_bound, cfg.laurent_bound);
    CheckResult cc = tower_cartier_check(T, cfg.degree_bound);
    R.j["cartier_criterion"] = {{"weights", cc.checked}, {"pass", cc.pass}};
    R.table << "Cartier criterion: weights " << cc.checked << "  " << (cc.pass ? "holds" : "fails") << "\n";
    R.check("Cartier criterion", cc.pass, cc.witness);
}

void cmd_monodromy(Report& R, const RunConfig& cfg, const LogChart& c) {
    MonodromyReport m = monodromy(c, cfg.level, cfg.degree_bound, cfg.laurent_bound);
    json ranks = json::array();
    R.table << "degree  |W[-1]|  |theta W[-1]|  |W~|  |W|   (log_p, level 1)\n";
    for (size_t i = 0; i < m.ranks.size(); ++i) {
        const auto& a = m.ranks[i];
        ranks.push_back({{"degree", i}, {"shifted", a[0]}, {"theta_image", a[1]}, {"middle", a[2]}, {"quotient", a[3]}});
        R.table << "  " << i << "      " << a[0] << "        " << a[1] << "              " << a[2] << "     " << a[3] << "\n";
    }
    R.j["ranks"] = ranks;
    R.j["classes"] = m.classes;
    R.j["n_nonzero"] = m.n_nonzero;
    R.table << "classes " << m.classes << "  N nonzero on " << m.n_nonzero << "\n";
    R.check("sequence exact", m.exact, m.witness);
    R.check("kernel filtration", m.kernel_filtration, m.witness);
    R.check("N phi = p phi N", m.n_phi, m.witness);
    R.check("N(1) = 0", m.n_of_one_zero, m.witness);
}

void cmd_koszul(Report& R, const RunConfig& cfg, const LogChart& c) {
    KoszulTower X(c, cfg.level, cfg.degree_bound, cfg.laurent_bound);
    json levels = tower_table(R, X, cfg.level);
    for (auto& lv : levels) lv["tau_status"] = "not computed";
    R.j["levels"] = levels;
    tower_checks(R, dieudonne_tower_check(X), "");
    TowerCheckOptions opt;
    opt.product_degree_bound = 2;
    tower_checks(R, fv_procomplex_check(X, specialized_log_data(X), opt), "");
    for (int r = 1; r < cfg.level; ++r) {
        AxiomResult f = fil_exactness_check(X, r);
        R.check("Fil exactness r=" + std::to_string(r), f.pass, f.witness);
    }
    CheckResult psi = divided_frobenius_check(X.model());
    R.check("psi onto eta_p", psi.pass, psi.witness);
    CheckResult ht = hodge_tate_check(c, cfg.degree_bound, cfg.laurent_bound);
    R.check("H^*(K/p) matches omega", ht.pass, ht.witness);
}

void cmd_tau(Report& R, const RunConfig& cfg, const LogChart& c) {
    DRWTower W(c, LogBase::Standard, cfg.level, cfg.degree_bound, cfg.laurent_bound);
    KoszulTower X(c, cfg.level, cfg.degree_bound, cfg.laurent_bound);
    TauReport t = tau_compare(W, X, cfg.level);
    const bool iso = t.unique && t.bijective;
    R.j["tau"] = {{"levels", t.levels},
                  {"pieces", t.pieces},
                  {"constraints", t.checks},
                  {"unique", t.unique},
                  {"bijective", t.bijective},
                  {"identity_on_coefficients", t.identity_on_coefficients},
                  {"isomorphism", iso}};
    R.table << "levels " << t.levels << "  pieces " << t.pieces << "\n";
    R.table << "isomorphism: " << (iso ? "true" : "false") << "\n";
    R.check("tau unique", t.unique, t.witness);
    R.check("tau bijective", t.bijective, t.witness);
    R.check("tau compatible", t.pass, t.witness);

    if (!c.blocks().empty() && c.blocks()[0].size() >= 2) {
        const u64 unit = c.p() > 2 ? 2 : 1;
        CoordinateReport co = coordinate_independence_check(c, unit, cfg.level, cfg.degree_bound);
        R.j["coordinates"] = {{"unit", unit},
                              {"tau_equal", co.tau_equal},
                              {"alpha_differs", co.alpha_differs},
                              {"delta_differs", co.delta_differs}};
        R.table << "coordinate change c=" << unit << ": tau equal " << (co.tau_equal ? "true" : "false")
                << ", alpha differs " << (co.alpha_differs ? "true" : "false") << ", delta differs "
                << (co.delta_differs ? "true" : "false") << "\n";
        R.check("tau independent of coordinates", co.tau_equal, co.witness);
        R.check("new log data invariants", co.log_invariants, co.witness);
    }
}

std::vector<std::vector<u64>> witt_elements(int p, int n) {
    std::vector<std::vector<u64>> out(1);
    for (int j = 0; j < n; ++j) {
        std::vector<std::vector<u64>> next;
        for (const auto& x : out)
            for (int a = 0; a < p; ++a) {
                auto y = x;
                y.push_back(static_cast<u64>(a));
                next.push_back(y);
            }
        out = next;
    }
    return out;
}

u64 eval_mod_p(const WittPoly& f, const std::vector<u64>& vars, int p) {
    u64 s = 0;
    for (const auto& [key, coef] : f.terms()) {
        u64 t = coef % static_cast<u64>(p);
        for (int v = 0; v < f.nvars() && t; ++v) {
            for (int e = WittPoly::exponent(key, v); e > 0; --e) t = t * vars[static_cast<size_t>(v)] % static_cast<u64>(p);
        }
        s = (s + t) % static_cast<u64>(p);
    }
    return s;
}

std::string tuple_text(const std::vector<u64>& x) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    return os.str();
}

void cmd_witt_table(Report& R, const RunConfig& cfg, int p) {
    const int n = cfg.level;
    if (n > 3) throw UsageError("witt-table: level at most 3");
    const WittStructurePolys& W = witt_polys(p, n);
    R.j["prime"] = p;
    R.table << "W_" << n << "(F_" << p << ")\n";
    auto elems = witt_elements(p, n);
    json add = json::array(), mul = json::array();
    for (const auto& a : elems) {
        for (const auto& b : elems) {
            std::vector<u64> ab = a;
            ab.insert(ab.end(), b.begin(), b.end());
            std::vector<u64> s, m;
            for (int j = 0; j < n; ++j) {
                s.push_back(eval_mod_p(W.S[static_cast<size_t>(j)], ab, p));
                m.push_back(eval_mod_p(W.P[static_cast<size_t>(j)], ab, p));
            }
            add.push_back({a, b, s});
            mul.push_back({a, b, m});
            R.table << tuple_text(a) << "+" << tuple_text(b) << "=" << tuple_text(s) << "  " << tuple_text(a) << "*"
                    << tuple_text(b) << "=" << tuple_text(m) << "\n";
        }
    }
    R.j["add"] = add;
    R.j["mul"] = mul;
    R.check("structure polynomials", W.validate());
}

int emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream f(cfg.out);
    if (!f) {
        std::cerr << "cannot write " << cfg.out << "\n";
        return 2;
    }
    f << text;
    return 0;
}

std::string render(const RunConfig& cfg, Report& R) {
    R.j["pass"] = R.pass;
    if (cfg.format == "json") return R.j.dump(2) + "\n";
    std::ostringstream os;
    os << R.table.str();
    for (const auto& c : R.j["checks"]) {
        os << (c["pass"].get<bool>() ? "PASS  " : "FAIL  ") << c["name"].get<std::string>();
        if (c.contains("witness")) os << "  (" << c["witness"].get<std::string>() << ")";
        os << "\n";
    }
    os << (R.pass ? "all checks pass" : "some checks fail") << "\n";
    return os.str();
}

int error_exit(const RunConfig& cfg, const std::string& type, const std::string& msg, int code) {
    json e = {{"schema", kSchemaVersion}, {"command", cfg.command}, {"error", {{"type", type}, {"message", msg}}}};
    if (cfg.format == "json") {
        emit(cfg, e.dump(2) + "\n");
    } else {
        std::cerr << type << ": " << msg << "\n";
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"de Rham-Witt computations on monomial charts"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* s, bool needs_chart) {
        auto* ch = s->add_option("--chart", cfg.chart_path, "chart JSON file");
        if (needs_chart) ch->required()->check(CLI::ExistingFile);
        s->add_option("--prime", cfg.prime, "override the chart prime")->check(CLI::Range(2, kMaxPrime));
        s->add_option("--level", cfg.level, "level r (or Witt length n)")->check(CLI::Range(1, kMaxLevel));
        s->add_option("--degree-bound", cfg.degree_bound, "degree window D")->check(CLI::Range(i64{0}, kMaxDegree));
        s->add_option("--laurent-bound", cfg.laurent_bound, "laurent window L")->check(CLI::Range(i64{0}, kMaxDegree));
        s->add_option("--format", cfg.format, "table or json")->check(CLI::IsMember({"table", "json"}));
        s->add_option("--seed", cfg.seed, "seed for randomized suites (recorded in the report)");
        s->add_option("--out", cfg.out, "write the report here instead of stdout");
    };
    struct Sub {
        const char* name;
        const char* help;
        bool chart;
    };
    const Sub subs[] = {
        {"drw", "de Rham-Witt tower: divisors per level and degree, tower checks", true},
        {"cartier", "C^-1 on omega and the Cartier criterion on the tower", true},
        {"monodromy", "the theta sequence and the monodromy operator", true},
        {"koszul", "Koszul cohomology with Bockstein and its tower checks", true},
        {"tau", "the comparison map per level and the coordinate change", true},
        {"witt-table", "addition and multiplication in W_n(F_p)", false},
    };
    for (const auto& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        add_common(sc, s.chart);
        sc->callback([&cfg, name = std::string(s.name)] { cfg.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    Report R;
    try {
        if (cfg.command == "witt-table") {
            if (!cfg.prime) throw UsageError("witt-table needs --prime");
            header(R, cfg, nullptr);
            cmd_witt_table(R, cfg, *cfg.prime);
        } else {
            LogChart c = LogChart::load(cfg.chart_path);
            if (cfg.prime) c = c.with_prime(*cfg.prime);
            if (c.p() > kMaxPrime) throw UsageError("prime " + std::to_string(c.p()) + " above the ceiling 5");
            header(R, cfg, &c);
            if (cfg.command == "drw") cmd_drw(R, cfg, c);
            else if (cfg.command == "cartier") cmd_cartier(R, cfg, c);
            else if (cfg.command == "monodromy") cmd_monodromy(R, cfg, c);
            else if (cfg.command == "koszul") cmd_koszul(R, cfg, c);
            else if (cfg.command == "tau") cmd_tau(R, cfg, c);
        }
    } catch (const UsageError& e) {
        return error_exit(cfg, "UsageError", e.what(), 2);
    } catch (const ChartError& e) {
        return error_exit(cfg, "ChartError", e.what(), 2);
    } catch (const CapacityExceeded& e) {
        return error_exit(cfg, "CapacityExceeded", e.what(), 2);
    } catch (const InvariantViolation& e) {
        return error_exit(cfg, "InvariantViolation", e.what(), 1);
    } catch (const ComparisonFailure& e) {
        return error_exit(cfg, "ComparisonFailure", e.what(), 1);
    } catch (const ExactnessFailure& e) {
        return error_exit(cfg, "ExactnessFailure", e.what(), 1);
    } catch (const std::exception& e) {
        return error_exit(cfg, "Error", e.what(), 1);
    }
    int rc = emit(cfg, render(cfg, R));
    if (rc) return rc;
    return R.pass ? 0 : 1;
}
