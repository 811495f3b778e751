#include "support.hpp"

#include "qhecke/cache.hpp"
#include "qhecke/hecke.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace qhecke;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qhecke-cache-test-" + std::to_string(testing::Rng(std::random_device{}()).next()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_SUITE("cache") {

TEST_CASE("round trip is bit exact") {
    for (i64 p : {2, 11, 17, 23, 41}) {
        CAPTURE(p);
        const ClassSet C = left_ideal_classes(maximal_order_basis(build_algebra(p)));
        SplitStore store;
        make_context(C, 1, p == 3 ? 2 : 3, &store);
        const std::string text = serialize_cache(C, store);
        const CachedData d = parse_cache(text, p);
        CHECK(serialize_cache(d.C, d.splits) == text);
        CHECK(d.C.h() == C.h());
        CHECK(d.C.unit_orders == C.unit_orders);
        for (size_t c = 0; c < C.h(); ++c) CHECK(d.C.reps[c] == C.reps[c]);
        CHECK(d.splits == store);
    }
}

TEST_CASE("save, load and missing files") {
    TempDir dir;
    CHECK_FALSE(load_cache(dir.str(), 11).has_value());
    const ClassSet C = left_ideal_classes(maximal_order_basis(build_algebra(11)));
    SplitStore store;
    make_context(C, 1, 3, &store);
    save_cache(dir.str(), C, store);
    const auto loaded = load_cache(dir.str(), 11);
    REQUIRE(loaded.has_value());
    CHECK(loaded->splits == store);
    CHECK(slurp(cache_path(dir.str(), 11)) == serialize_cache(C, store));
    // No temporary files are left behind.
    size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir.path)) files += e.is_regular_file();
    CHECK(files == 1);
    // A cached class set drives the same Hecke matrices.
    CHECK(hecke_matrix_level1(loaded->C, 2).counts == hecke_matrix_level1(C, 2).counts);
}

TEST_CASE("corrupt files are rejected") {
    TempDir dir;
    const ClassSet C = left_ideal_classes(maximal_order_basis(build_algebra(11)));
    SplitStore store;
    make_context(C, 1, 3, &store);
    save_cache(dir.str(), C, store);
    const std::string path = cache_path(dir.str(), 11);
    const std::string good = slurp(path);

    spit(path, good.substr(0, good.size() / 2));
    CHECK_THROWS_AS(load_cache(dir.str(), 11), CacheError);

    spit(path, replace_once(good, "\"unit_order\": 4", "\"unit_order\": 8"));
    CHECK_THROWS_AS(verify_cache(dir.str(), 11), CacheError);

    spit(path, good + " ");
    CHECK_THROWS_AS(verify_cache(dir.str(), 11), CacheError);

    spit(path, replace_once(good, "\"schema_version\": 1", "\"schema_version\": 2"));
    CHECK_THROWS_AS(verify_cache(dir.str(), 11), CacheError);

    // Break a stored splitting: the first entry of A.
    const auto apos = good.find("\"A\": [");
    REQUIRE(apos != std::string::npos);
    std::string bad = good;
    const auto num = bad.find_first_of("0123456789", apos + 6);
    bad[num] = bad[num] == '1' ? '2' : '1';
    spit(path, bad);
    CHECK_THROWS_AS(verify_cache(dir.str(), 11), CacheError);

    spit(path, good);
    CHECK_THROWS_AS(parse_cache(good, 13), CacheError);
    CHECK_NOTHROW(verify_cache(dir.str(), 11));
}

TEST_CASE("rebuild keeps the splitting keys") {
    TempDir dir;
    CHECK_THROWS_AS(verify_cache(dir.str(), 23), CacheError);
    const CachedData fresh = rebuild_cache(dir.str(), 23);
    CHECK(fresh.C.h() == 3);
    CHECK(fresh.splits.empty());
    const ClassSet C = fresh.C;
    SplitStore store;
    make_context(C, 1, 5, &store);
    save_cache(dir.str(), C, store);
    spit(cache_path(dir.str(), 23), replace_once(slurp(cache_path(dir.str(), 23)), "\"unit_order\"", "\"unit_orderX\""));
    CHECK_THROWS_AS(verify_cache(dir.str(), 23), CacheError);
    const CachedData again = rebuild_cache(dir.str(), 23);
    CHECK(again.splits.size() == store.size());
    CHECK_NOTHROW(verify_cache(dir.str(), 23));
}

TEST_CASE("directory resolution") {
    ::unsetenv("QHECKE_CACHE_DIR");
    CHECK(cache_dir("fallback") == "fallback");
    ::setenv("QHECKE_CACHE_DIR", "/tmp/elsewhere", 1);
    CHECK(cache_dir("fallback") == "/tmp/elsewhere");
    ::unsetenv("QHECKE_CACHE_DIR");
    CHECK(cache_path("d", 11) == (fs::path("d") / "p11.json").string());
}

}
