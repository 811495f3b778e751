#include "qhecke/cache.hpp"
#include "qhecke/hecke.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>

using namespace qhecke;
using nlohmann::json;

namespace {

constexpr const char* kDefaultCacheDir = ".qhecke-cache";

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fp2_str(F2 x) { return "[" + std::to_string(x.s) + "," + std::to_string(x.t) + "]"; }

json gamma_json(const Mat2& g) { return json::array({g.a, g.b, g.c, g.d}); }

struct Session {
    bool use_cache = false;
    std::string dir;
    bool timing = false;
    ClassSet C;
    SplitStore splits;
    size_t splits_loaded = 0;
};

void obtain_classes(i64 p, Session& s) {
    Stopwatch sw;
    if (s.use_cache) {
        if (auto cached = load_cache(s.dir, p)) {
            s.C = cached->C;
            s.splits = cached->splits;
            s.splits_loaded = s.splits.size();
            if (s.timing) std::cerr << "timing: classset cache hit " << sw.ms() << " ms\n";
            return;
        }
    }
    AlgebraParams A = build_algebra(p);
    s.C = left_ideal_classes(maximal_order_basis(A));
    if (s.timing) std::cerr << "timing: classset computed " << sw.ms() << " ms\n";
    if (s.use_cache) save_cache(s.dir, s.C, s.splits);
}

void persist(Session& s) {
    if (s.use_cache && s.splits.size() != s.splits_loaded) {
        save_cache(s.dir, s.C, s.splits);
        s.splits_loaded = s.splits.size();
    }
}

void setup_cache(Session& s, bool flag, const std::string& dir_opt) {
    const char* env = std::getenv("QHECKE_CACHE_DIR");
    s.use_cache = flag || !dir_opt.empty() || (env && *env);
    s.dir = !dir_opt.empty() ? dir_opt : cache_dir(kDefaultCacheDir);
}

int cmd_classset(i64 p, const std::string& format, Session& s) {
    obtain_classes(p, s);
    const ClassSet& C = s.C;
    const mpq_class expected = eichler_mass(p);
    if (C.mass() != expected) throw Error("mass " + C.mass().get_str() + " != " + expected.get_str());
    const AlgebraParams& A = C.O.params;
    if (format == "pretty") {
        std::cout << "p = " << p << ", eps = " << A.eps;
        if (A.r) std::cout << ", r = " << *A.r << ", a = " << *A.a;
        std::cout << "\norder basis:";
        for (const auto& q : C.O.s) std::cout << "  " << to_string(q);
        std::cout << "\nh = " << C.h() << "\nmass = " << C.mass().get_str() << " (expected " << expected.get_str() << ")\n";
        for (size_t j = 0; j < C.h(); ++j) {
            std::cout << "class " << j + 1 << ": nrd " << C.norms[j] << ", units " << C.unit_orders[j] << "\n  basis:";
            for (const auto& q : C.bases[j]) std::cout << "  " << to_string(q);
            std::cout << "\n";
            for (const auto& [ell, w] : C.local_gens[j].w) std::cout << "  w_" << ell << " = " << to_string(w) << "\n";
        }
        for (const auto& n : C.O.notes) std::cout << "note: " << n << "\n";
        return 0;
    }
    if (format != "json") throw UsageError("classset supports --format json|pretty");
    json out;
    out["schema_version"] = 1;
    out["p"] = p;
    out["eps"] = A.eps;
    out["r"] = A.r ? json(*A.r) : json(nullptr);
    out["a"] = A.a ? json(*A.a) : json(nullptr);
    json ob = json::array();
    for (const auto& q : C.O.s) ob.push_back(to_string(q));
    out["order_basis"] = ob;
    out["h"] = C.h();
    out["mass"] = C.mass().get_str();
    out["mass_expected"] = expected.get_str();
    json classes = json::array();
    for (size_t j = 0; j < C.h(); ++j) {
        json e;
        e["class"] = j + 1;
        e["norm"] = C.norms[j].get_str();
        e["unit_order"] = C.unit_orders[j];
        json b = json::array();
        for (const auto& q : C.bases[j]) b.push_back(to_string(q));
        e["basis"] = b;
        json lg = json::object();
        for (const auto& [ell, w] : C.local_gens[j].w) lg[std::to_string(ell)] = to_string(w);
        e["local_generators"] = lg;
        classes.push_back(e);
    }
    out["classes"] = classes;
    out["notes"] = C.O.notes;
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct HeckeOptions {
    i64 p = 0, N = 1;
    std::vector<i64> ells;
    std::optional<i64> weight;
    bool general = false, brandt = false, witnesses = false, eigen = false;
    std::string format = "json";
    unsigned threads = 0;
};

enum class Mode { Level1, Weight, General };

json witness_json(const HeckeData& D, const GeneralHecke* G) {
    json out = json::array();
    for (size_t j = 0; j < D.target.size(); ++j)
        for (size_t k = 0; k < D.target[j].size(); ++k) {
            const CosetTarget& t = D.target[j][k];
            json e;
            e["from_class"] = j + 1;
            e["coset"] = k;
            e["to_class"] = t.i + 1;
            json al = json::array();
            for (const auto& w : t.witnesses) al.push_back(to_string(w.alpha));
            e["alphas"] = al;
            if (G) {
                json rs = json::array();
                for (const auto& q : G->qs[j][k]) {
                    json r;
                    r["mu"] = fp2_str(q.qp);
                    if (G->N > 1) r["gamma"] = gamma_json(q.qg);
                    rs.push_back(r);
                }
                e["residues"] = rs;
            }
            out.push_back(e);
        }
    return out;
}

json fmat_json(const FMat& M, bool in_fp) {
    json rows = json::array();
    for (const auto& r : M) {
        json row = json::array();
        for (F2 x : r) row.push_back(in_fp ? json(x.s) : json(fp2_str(x)));
        rows.push_back(row);
    }
    return rows;
}

void print_fmat(std::ostream& os, const FMat& M, bool in_fp) {
    for (const auto& r : M) {
        for (size_t c = 0; c < r.size(); ++c) os << (c ? " " : "  ") << (in_fp ? std::to_string(r[c].s) : fp2_str(r[c]));
        os << "\n";
    }
}

int cmd_hecke(HeckeOptions o, Session& s) {
    if (o.ells.empty()) throw UsageError("--ell requires at least one prime");
    std::vector<i64> ells;
    for (i64 e : o.ells)
        if (std::find(ells.begin(), ells.end(), e) == ells.end()) ells.push_back(e);
    if (o.format != "json" && o.format != "csv" && o.format != "pretty") throw UsageError("--format must be json, csv or pretty");
    if (!is_prime(o.p)) throw UsageError("p = " + std::to_string(o.p) + " is not prime");
    if (o.N < 1) throw UsageError("N must be positive");
    Mode mode = Mode::Level1;
    if (o.weight) {
        if (*o.weight < 0 || *o.weight >= o.p * o.p - 1)
            throw UsageError("weight must satisfy 0 <= k < p^2 - 1 = " + std::to_string(o.p * o.p - 1));
        if (o.p == 2) {
            if (*o.weight != 0 || o.N != 1) throw UsageError("p = 2 supports only level 1, weight 0");
        } else {
            mode = Mode::Weight;
        }
    }
    if (o.general) {
        if (o.weight) throw UsageError("--general and --weight are exclusive");
        mode = Mode::General;
    } else if (!o.weight && o.N > 1) {
        mode = Mode::General;
    }
    if (mode != Mode::Level1 && o.p == 2) throw UsageError("p = 2 supports only level 1, weight 0");
    if (o.brandt && mode != Mode::Level1) throw UsageError("--brandt applies to the level-1 weight-0 matrix only");
    for (i64 e : ells) {
        if (!is_prime(e)) throw UsageError("ell0 = " + std::to_string(e) + " is not prime");
        if (e == o.p || o.N % e == 0) throw UsageError("ell0 = " + std::to_string(e) + " must be coprime to pN");
        if (gcd(o.N, o.p) != 1) throw UsageError("N must be coprime to p");
    }

    obtain_classes(o.p, s);
    const ClassSet& C = s.C;
    const bool in_fp = mode != Mode::Weight;
    json results = json::array();
    std::vector<FMat> mats;
    std::ostringstream text;
    bool first_witness_only = false;
    if (o.format == "csv") std::cout << "ell0,row,col,s,t\n";

    for (i64 ell0 : ells) {
        Stopwatch sw;
        HeckeData D = compute_hecke_data(C, o.N, ell0, o.threads, &s.splits);
        json r;
        r["ell0"] = ell0;
        std::optional<GeneralHecke> G;
        FMat M;
        json basis = json::array();
        if (mode == Mode::Level1) {
            LevelOneMatrix T = hecke_matrix_level1(D);
            M = level1_as_fmat(T);
            for (size_t j = 0; j < C.h(); ++j) basis.push_back(json{{"class", j + 1}});
            if (o.brandt) r["brandt_integer"] = T.counts;
        } else {
            G = hecke_matrix_general(D);
            first_witness_only = first_witness_only || G->first_witness_only;
            if (mode == Mode::Weight) {
                M = G->weight_k(*o.weight);
                for (size_t i = 0; i < C.h(); ++i)
                    for (const auto& g : G->G.elems) {
                        json b{{"class", i + 1}};
                        if (o.N > 1) b["gamma"] = gamma_json(g);
                        basis.push_back(b);
                    }
            } else if (o.format == "csv" && !o.eigen) {
                G->stream_csv(std::cout);
            } else {
                M = G->dense();
                for (size_t idx = 0; idx < G->dim(); ++idx) {
                    PointIndex pt = G->point(idx);
                    json b{{"class", pt.j + 1}, {"mu", fp2_str(pt.mu)}};
                    if (o.N > 1) b["gamma"] = gamma_json(pt.gamma);
                    basis.push_back(b);
                }
            }
        }
        if (s.timing) std::cerr << "timing: ell0 = " << ell0 << " " << sw.ms() << " ms\n";
        if (o.format == "csv" && !M.empty()) {
            for (size_t a = 0; a < M.size(); ++a)
                for (size_t b = 0; b < M.size(); ++b)
                    std::cout << ell0 << ',' << a << ',' << b << ',' << M[a][b].s << ',' << M[a][b].t << '\n';
        }
        r["dimension"] = mode == Mode::General ? G->dim() : M.size();
        if (o.format == "json") {
            r["basis"] = basis;
            r["matrix_mod_p"] = fmat_json(M, in_fp);
            if (o.witnesses) r["witnesses"] = witness_json(D, G ? &*G : nullptr);
        }
        if (o.format == "pretty") {
            text << "T_" << ell0 << " (" << M.size() << "x" << M.size() << ", entry (row j, col i) = T(1_i)(j)):\n";
            print_fmat(text, M, in_fp);
            if (o.brandt) {
                text << ell0 << "*T_" << ell0 << " over Z:\n";
                for (const auto& row : r["brandt_integer"]) {
                    text << " ";
                    for (const auto& x : row) text << " " << x.get<i64>();
                    text << "\n";
                }
            }
        }
        results.push_back(r);
        if (o.eigen) mats.push_back(M);
    }
    persist(s);

    json eig = json::array();
    size_t unsplit = 0;
    if (o.eigen) {
        Fp2Field K(o.p, C.O.params.eps);
        EigensystemResult er = simultaneous_eigensystems(K, mats);
        unsplit = er.unsplit_dimension;
        for (const auto& sys : er.systems) {
            json e;
            json vals = json::object();
            for (size_t t = 0; t < ells.size(); ++t) vals[std::to_string(ells[t])] = fp2_str(sys.values[t]);
            e["values"] = vals;
            e["multiplicity"] = sys.multiplicity;
            e["diagonalizable"] = sys.diagonalizable;
            eig.push_back(e);
        }
    }

    if (o.format == "json") {
        json out;
        out["schema_version"] = 1;
        out["p"] = o.p;
        out["N"] = o.N;
        out["weight"] = o.weight ? json(*o.weight) : json(0);
        out["mode"] = mode == Mode::Level1 ? "level1" : mode == Mode::Weight ? "weight" : "general";
        out["convention"] = "entry (row j, col i) = T(1_i)(j)";
        if (mode != Mode::Level1) out["identification"] = first_witness_only ? "first-witness" : "averaged";
        out["results"] = results;
        if (o.eigen) {
            out["eigensystems"] = eig;
            out["eigen_unsplit_dimension"] = unsplit;
        }
        std::cout << out.dump(2) << "\n";
    } else if (o.format == "pretty") {
        std::cout << "p = " << o.p << ", N = " << o.N;
        if (o.weight) std::cout << ", weight " << *o.weight;
        std::cout << "\n" << text.str();
        if (o.eigen) {
            std::cout << "eigensystems:\n";
            for (const auto& e : eig) {
                std::cout << " ";
                for (const auto& [k, v] : e["values"].items()) std::cout << " a_" << k << " = " << v.get<std::string>();
                std::cout << "  (multiplicity " << e["multiplicity"].get<size_t>()
                          << (e["diagonalizable"].get<bool>() ? "" : ", generalized") << ")\n";
            }
            if (unsplit) std::cout << "  dimension " << unsplit << " not split over F_{p^2}\n";
        }
    } else if (o.eigen) {
        for (const auto& e : eig) {
            std::cout << "#eigensystem";
            for (const auto& [k, v] : e["values"].items()) std::cout << ' ' << k << '=' << v.get<std::string>();
            std::cout << " multiplicity=" << e["multiplicity"].get<size_t>() << '\n';
        }
    }
    return 0;
}

int cmd_cache(const std::string& action, i64 p, const std::string& dir) {
    if (!is_prime(p)) throw UsageError("p = " + std::to_string(p) + " is not prime");
    CachedData d = action == "rebuild" ? rebuild_cache(dir, p) : verify_cache(dir, p);
    json out;
    out["schema_version"] = 1;
    out["p"] = p;
    out["action"] = action;
    out["status"] = "ok";
    out["path"] = cache_path(dir, p);
    out["h"] = d.C.h();
    out["mass"] = d.C.mass().get_str();
    out["splittings"] = d.splits.size();
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mod-p Hecke operators on definite quaternion algebras"};
    app.require_subcommand(1);

    Session session;
    bool use_cache = false;
    std::string cache_dir_opt;

    auto* cs = app.add_subcommand("classset", "Left ideal classes of the maximal order");
    i64 cs_p = 0;
    std::string cs_format = "json";
    cs->add_option("-p,--prime", cs_p, "prime p")->required();
    cs->add_option("--format", cs_format, "json or pretty");
    cs->add_flag("--cache", use_cache, "use the result cache");
    cs->add_option("--cache-dir", cache_dir_opt, "cache directory");
    cs->add_flag("--timing", session.timing, "report timings on stderr");

    auto* hk = app.add_subcommand("hecke", "Hecke operator matrices");
    HeckeOptions ho;
    hk->add_option("-p,--prime", ho.p, "prime p")->required();
    hk->add_option("-N,--level", ho.N, "level N coprime to p");
    hk->add_option("--ell", ho.ells, "primes ell0, comma separated")->required()->delimiter(',');
    hk->add_option("--weight", ho.weight, "weight k with 0 <= k < p^2 - 1");
    hk->add_flag("--general", ho.general, "full matrix on the (class, mu, gamma) index set");
    hk->add_flag("--brandt", ho.brandt, "include the integer companion ell0*T");
    hk->add_flag("--witnesses", ho.witnesses, "include the norm-equation witnesses");
    hk->add_flag("--eigen", ho.eigen, "simultaneous eigensystems over F_{p^2}");
    hk->add_option("--format", ho.format, "json, csv or pretty");
    hk->add_option("--threads", ho.threads, "worker threads (0 = all cores)");
    hk->add_flag("--cache", use_cache, "use the result cache");
    hk->add_option("--cache-dir", cache_dir_opt, "cache directory");
    hk->add_flag("--timing", session.timing, "report timings on stderr");

    auto* ck = app.add_subcommand("cache", "Verify or rebuild a cache file");
    std::string action;
    i64 ck_p = 0;
    std::string ck_dir;
    ck->add_option("action", action, "verify or rebuild")->required()->check(CLI::IsMember({"verify", "rebuild"}));
    ck->add_option("-p,--prime", ck_p, "prime p")->required();
    ck->add_option("--dir", ck_dir, "cache directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        setup_cache(session, use_cache, cache_dir_opt);
        if (cs->parsed()) return cmd_classset(cs_p, cs_format, session);
        if (hk->parsed()) return cmd_hecke(ho, session);
        if (ck->parsed()) return cmd_cache(action, ck_p, ck_dir.empty() ? cache_dir(kDefaultCacheDir) : ck_dir);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
