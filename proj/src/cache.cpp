#include "qhecke/cache.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace qhecke {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json quat_json(const Quat& q) {
    json a = json::array();
    for (const auto& c : q.c) a.push_back(to_string(c));
    return a;
}

Quat quat_from(const json& a) {
    if (!a.is_array() || a.size() != 4) throw CacheError("cache: quaternion must be 4 rationals");
    Quat q;
    for (int k = 0; k < 4; ++k) q.c[k] = parse_rational(a.at(k).get<std::string>());
    return q;
}

json mat_json(const Mat2& m) { return json::array({m.a, m.b, m.c, m.d}); }

Mat2 mat_from(const json& a) {
    if (!a.is_array() || a.size() != 4) throw CacheError("cache: matrix must have 4 entries");
    return {a.at(0).get<i64>(), a.at(1).get<i64>(), a.at(2).get<i64>(), a.at(3).get<i64>()};
}

json params_json(const AlgebraParams& A) {
    json j;
    j["p"] = A.p;
    j["eps"] = A.eps;
    j["r"] = A.r ? json(*A.r) : json(nullptr);
    j["a"] = A.a ? json(*A.a) : json(nullptr);
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cache: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string cache_dir(const std::string& fallback) {
    const char* env = std::getenv("QHECKE_CACHE_DIR");
    return env && *env ? std::string(env) : fallback;
}

std::string cache_path(const std::string& dir, i64 p) { return (fs::path(dir) / ("p" + std::to_string(p) + ".json")).string(); }

std::string serialize_cache(const ClassSet& C, const SplitStore& splits) {
    json j;
    j["schema_version"] = 1;
    j["algebra"] = params_json(C.O.params);
    json basis = json::array();
    for (const auto& s : C.O.s) basis.push_back(quat_json(s));
    j["basis"] = basis;
    json classes = json::array();
    for (size_t c = 0; c < C.h(); ++c) {
        json e;
        json hnf_rows = json::array();
        for (const auto& row : C.reps[c].b) {
            json r = json::array();
            for (const auto& x : row) r.push_back(x.get_str());
            hnf_rows.push_back(r);
        }
        e["hnf"] = hnf_rows;
        e["denominator"] = C.reps[c].den.get_str();
        e["unit_order"] = C.unit_orders[c];
        json b = json::array();
        for (const auto& q : C.bases[c]) b.push_back(quat_json(q));
        e["basis"] = b;
        json lg = json::object();
        for (const auto& [ell, w] : C.local_gens[c].w) lg[std::to_string(ell)] = quat_json(w);
        e["local_gens"] = lg;
        classes.push_back(e);
    }
    j["classes"] = classes;
    json sp = json::array();
    for (const auto& [key, ab] : splits) {
        json e;
        e["ell"] = key.first;
        e["n"] = key.second;
        e["A"] = mat_json(ab.first);
        e["B"] = mat_json(ab.second);
        sp.push_back(e);
    }
    j["splittings"] = sp;
    return j.dump(2) + "\n";
}

CachedData parse_cache(const std::string& text, i64 expected_p) {
    try {
        json j = json::parse(text);
        if (j.at("schema_version").get<int>() != 1) throw CacheError("cache: unsupported schema_version");
        const json& alg = j.at("algebra");
        const i64 p = alg.at("p").get<i64>();
        if (p != expected_p) throw CacheError("cache: file is for p = " + std::to_string(p));
        AlgebraParams A = build_algebra(p);
        if (params_json(A) != alg) throw CacheError("cache: algebra parameters do not match");
        Order O = maximal_order_basis(A);
        const json& basis = j.at("basis");
        if (!basis.is_array() || basis.size() != 4) throw CacheError("cache: order basis must have 4 elements");
        for (int k = 0; k < 4; ++k)
            if (quat_from(basis.at(k)) != O.s[k]) throw CacheError("cache: order basis does not match");
        std::vector<std::array<Quat, 4>> bases;
        for (const auto& e : j.at("classes")) {
            const json& b = e.at("basis");
            if (!b.is_array() || b.size() != 4) throw CacheError("cache: class basis must have 4 elements");
            bases.push_back({quat_from(b.at(0)), quat_from(b.at(1)), quat_from(b.at(2)), quat_from(b.at(3))});
        }
        CachedData out;
        out.C = class_set_from_bases(O, bases);
        const json& classes = j.at("classes");
        for (size_t c = 0; c < out.C.h(); ++c) {
            const json& e = classes.at(c);
            if (e.at("unit_order").get<long>() != out.C.unit_orders[c]) throw CacheError("cache: unit order mismatch");
            if (e.at("denominator").get<std::string>() != out.C.reps[c].den.get_str())
                throw CacheError("cache: denominator mismatch");
            const json& rows = e.at("hnf");
            for (int r = 0; r < 4; ++r)
                for (int k = 0; k < 4; ++k)
                    if (rows.at(r).at(k).get<std::string>() != out.C.reps[c].b[r][k].get_str())
                        throw CacheError("cache: HNF mismatch");
            json lg = json::object();
            for (const auto& [ell, w] : out.C.local_gens[c].w) lg[std::to_string(ell)] = quat_json(w);
            if (lg != e.at("local_gens")) throw CacheError("cache: local generator mismatch");
        }
        for (const auto& e : j.at("splittings")) {
            const i64 ell = e.at("ell").get<i64>();
            const int n = e.at("n").get<int>();
            if (!is_prime(ell) || ell == p || n < 2 || n > 40) throw CacheError("cache: bad splitting key");
            const i64 mod_n = ipow(ell, n);
            Mat2 X = mat_from(e.at("A")), Y = mat_from(e.at("B"));
            if (mat_reduce(X, mod_n) != X || mat_reduce(Y, mod_n) != Y) throw CacheError("cache: splitting entries out of range");
            if (!relations_hold(A, X, Y, mod_n) || !condition_holds(O, ell, X, Y, mod_n))
                throw CacheError("cache: stored splitting at ell = " + std::to_string(ell) + " fails verification");
            out.splits[{ell, n}] = {X, Y};
        }
        if (serialize_cache(out.C, out.splits) != text) throw CacheError("cache: file is not in canonical form");
        return out;
    } catch (const CacheError&) {
        throw;
    } catch (const json::exception& e) {
        throw CacheError(std::string("cache: malformed JSON: ") + e.what());
    } catch (const Error& e) {
        throw CacheError(std::string("cache: validation failed: ") + e.what());
    }
}

std::optional<CachedData> load_cache(const std::string& dir, i64 p) {
    const std::string path = cache_path(dir, p);
    if (!fs::exists(path)) return std::nullopt;
    return parse_cache(read_file(path), p);
}

void save_cache(const std::string& dir, const ClassSet& C, const SplitStore& splits) {
    const std::string text = serialize_cache(C, splits);
    fs::create_directories(dir);
    const std::string path = cache_path(dir, C.O.params.p);
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CacheError("cache: cannot write " + tmp);
        out << text;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw CacheError("cache: write failed for " + tmp);
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw CacheError("cache: rename failed: " + ec.message());
    }
}

CachedData verify_cache(const std::string& dir, i64 p) {
    auto c = load_cache(dir, p);
    if (!c) throw CacheError("cache: no file at " + cache_path(dir, p));
    return *c;
}

CachedData rebuild_cache(const std::string& dir, i64 p) {
    AlgebraParams A = build_algebra(p);
    Order O = maximal_order_basis(A);
    std::vector<std::pair<i64, int>> keys;
    const std::string path = cache_path(dir, p);
    if (fs::exists(path)) {
        try {
            json j = json::parse(read_file(path));
            for (const auto& e : j.at("splittings")) keys.push_back({e.at("ell").get<i64>(), e.at("n").get<int>()});
        } catch (const std::exception&) {
            keys.clear();
        }
    }
    CachedData out;
    out.C = left_ideal_classes(O);
    for (const auto& [ell, n] : keys) {
        if (!is_prime(ell) || ell == p || n < 2 || n > 40) continue;
        out.splits[{ell, n}] = split_to(O, ell, n);
    }
    save_cache(dir, out.C, out.splits);
    return out;
}

}  // namespace qhecke
