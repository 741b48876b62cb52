#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gtdet {

using BigInt = boost::multiprecision::cpp_int;

// One interlacing level: strictly increasing lattice positions.
using WeylConfig = std::vector<std::int64_t>;

bool is_weyl(const WeylConfig& x);
void require_weyl(const WeylConfig& x, const char* what);

// levels[k] has k+1 entries; levels[k] ≺ levels[k+1].
struct GTPattern {
    std::vector<WeylConfig> levels;

    std::size_t depth() const { return levels.size(); }
    const WeylConfig& level(std::size_t n) const { return levels.at(n - 1); }  // 1-based
    WeylConfig& level(std::size_t n) { return levels.at(n - 1); }
    bool valid() const;
    bool operator==(const GTPattern&) const = default;
    auto operator<=>(const GTPattern&) const = default;
};

struct SpaceTimePoint {
    int n = 1;
    double t = 0.0;
};

// (n1,t1) ≺ (n2,t2) iff n1 >= n2, t1 <= t2 and the pairs differ.
bool precedes(const SpaceTimePoint& a, const SpaceTimePoint& b);

// x^{n+1}_1 < x^n_1 <= x^{n+1}_2 < ... < x^n_n <= x^{n+1}_{n+1}
bool is_interlaced(const WeylConfig& lower, const WeylConfig& upper);

// phi(x,y) = 1[y >= x]; lower.size()+1 == upper.size(), the missing slot is
// the virtual variable with phi(virt, y) = 1. Returns det in {-1,0,1}.
int interlacing_indicator_det(const WeylConfig& lower, const WeylConfig& upper);

double vandermonde(const std::vector<double>& x);
BigInt vandermonde_exact(const WeylConfig& x);
double vandermonde(const WeylConfig& x);

// Delta_N(top) / prod_{n<N} n!
BigInt count_patterns(const WeylConfig& top);

inline constexpr std::size_t kEnumerateMaxDepth = 8;

// All patterns with the given top level, lexicographic in (level 1, level 2, ...).
std::vector<GTPattern> enumerate_patterns(const WeylConfig& top);

// Calls visit(pattern) for each pattern without materialising the list.
template <class F>
void for_each_pattern(const WeylConfig& top, F&& visit);

// x^n_k = -n-1+k.
GTPattern packed_pattern(int N);

std::string to_json(const GTPattern& p);
GTPattern pattern_from_json(const std::string& s);

// Lower levels that interlace with `upper`, lexicographic.
std::vector<WeylConfig> interlacing_lowers(const WeylConfig& upper);

namespace detail {
void fill_below(std::vector<WeylConfig>& levels, std::size_t n, const std::function<void()>& leaf);
}

template <class F>
void for_each_pattern(const WeylConfig& top, F&& visit) {
    std::vector<WeylConfig> levels(top.size());
    levels.back() = top;
    GTPattern p;
    detail::fill_below(levels, top.size() - 1, [&] {
        p.levels = levels;
        visit(static_cast<const GTPattern&>(p));
    });
}

}  // namespace gtdet
