#pragma once

// Definition-level oracles over plain integer tables. Nothing here calls the
// library's operator implementations; tests convert between the two worlds.

#include <cstdint>
#include <functional>
#include <vector>

#include "cartsim/frame.hpp"
#include "cartsim/object.hpp"

namespace oracle {

/// Row-major outcome table: out[a * envs + e] is a world index.
struct PlainFrame {
    int actions = 0;
    int envs = 0;
    int worlds = 0;
    std::vector<int> out;

    int at(int a, int e) const { return out[static_cast<std::size_t>(a * envs + e)]; }
};

inline bool in(std::uint64_t s, int w) { return (s >> w) & 1U; }

inline bool ensures(const PlainFrame& f, std::uint64_t s) {
    for (int a = 0; a < f.actions; ++a) {
        bool all = true;
        for (int e = 0; e < f.envs; ++e) all = all && in(s, f.at(a, e));
        if (all) return true;
    }
    return false;
}

inline bool prevents(const PlainFrame& f, std::uint64_t s) {
    for (int a = 0; a < f.actions; ++a) {
        bool none = true;
        for (int e = 0; e < f.envs; ++e) none = none && !in(s, f.at(a, e));
        if (none) return true;
    }
    return false;
}

inline bool observes(const PlainFrame& f, std::uint64_t s) {
    for (int a0 = 0; a0 < f.actions; ++a0) {
        for (int a1 = 0; a1 < f.actions; ++a1) {
            bool exists = false;
            for (int a = 0; a < f.actions; ++a) {
                bool ok = true;
                for (int e = 0; e < f.envs; ++e) {
                    const int w = f.at(a, e);
                    ok = ok && ((in(s, w) && w == f.at(a0, e)) || (!in(s, w) && w == f.at(a1, e)));
                }
                exists = exists || ok;
            }
            if (!exists) return false;
        }
    }
    return true;
}

inline std::uint64_t image(const PlainFrame& f) {
    std::uint64_t m = 0;
    for (int a = 0; a < f.actions; ++a)
        for (int e = 0; e < f.envs; ++e) m |= std::uint64_t{1} << f.at(a, e);
    return m;
}

inline bool inevitable(const PlainFrame& f, std::uint64_t s) {
    return f.actions > 0 && (image(f) & ~s) == 0;
}

inline bool holds(const PlainFrame& f, cartsim::FrameOperator op, std::uint64_t s) {
    switch (op) {
        case cartsim::FrameOperator::ensure: return ensures(f, s);
        case cartsim::FrameOperator::prevent: return prevents(f, s);
        case cartsim::FrameOperator::control: return ensures(f, s) && prevents(f, s);
        case cartsim::FrameOperator::observe: return observes(f, s);
        case cartsim::FrameOperator::inevitable: return inevitable(f, s);
    }
    return false;
}

/// n-agent table; `sizes` are action counts, env is the last axis.
struct PlainObject {
    std::vector<int> sizes;
    int envs = 0;
    int worlds = 0;
    std::vector<int> table;

    int cells() const {
        int c = envs;
        for (int s : sizes) c *= s;
        return c;
    }
    /// Visits every (joint action, env) with the world it maps to.
    void for_each(const std::function<void(const std::vector<int>&, int, int)>& f) const {
        std::vector<int> joint(sizes.size(), 0);
        int cell = 0;
        while (true) {
            for (int e = 0; e < envs; ++e) f(joint, e, table[static_cast<std::size_t>(cell++)]);
            int k = static_cast<int>(sizes.size()) - 1;
            while (k >= 0 && ++joint[static_cast<std::size_t>(k)] == sizes[static_cast<std::size_t>(k)]) {
                joint[static_cast<std::size_t>(k)] = 0;
                --k;
            }
            if (k < 0) return;
        }
    }
};

/// Agent i (0-based) can force S: some action keeps every other choice inside S.
inline bool ensure_n(const PlainObject& o, int i, std::uint64_t s) {
    std::vector<bool> ok(static_cast<std::size_t>(o.sizes[static_cast<std::size_t>(i)]), true);
    o.for_each([&](const std::vector<int>& j, int, int w) {
        if (!in(s, w)) ok[static_cast<std::size_t>(j[static_cast<std::size_t>(i)])] = false;
    });
    for (bool b : ok)
        if (b) return true;
    return false;
}

inline bool prevent_n(const PlainObject& o, int i, std::uint64_t s) {
    std::vector<bool> ok(static_cast<std::size_t>(o.sizes[static_cast<std::size_t>(i)]), true);
    o.for_each([&](const std::vector<int>& j, int, int w) {
        if (in(s, w)) ok[static_cast<std::size_t>(j[static_cast<std::size_t>(i)])] = false;
    });
    for (bool b : ok)
        if (b) return true;
    return false;
}

/// Weighted enumeration: Pr(outcome satisfies pred | agent i plays a).
/// dists[j] is agent j's distribution (ignored for j == i); env_dist over E.
inline double conditional(const PlainObject& o, int i, int a, const std::vector<std::vector<double>>& dists,
                          const std::vector<double>& env_dist, const std::function<bool(int)>& pred) {
    double p = 0.0;
    o.for_each([&](const std::vector<int>& j, int e, int w) {
        if (j[static_cast<std::size_t>(i)] != a || !pred(w)) return;
        double weight = env_dist[static_cast<std::size_t>(e)];
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (static_cast<int>(k) != i) weight *= dists[k][static_cast<std::size_t>(j[k])];
        }
        p += weight;
    });
    return p;
}

/// Exact certainty: no positive-mass outcome of action a falls outside pred.
inline bool certain(const PlainObject& o, int i, int a, const std::vector<std::vector<double>>& dists,
                    const std::vector<double>& env_dist, const std::function<bool(int)>& pred) {
    bool ok = true;
    o.for_each([&](const std::vector<int>& j, int e, int w) {
        if (j[static_cast<std::size_t>(i)] != a || pred(w) || env_dist[static_cast<std::size_t>(e)] == 0.0) return;
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (static_cast<int>(k) != i && dists[k][static_cast<std::size_t>(j[k])] == 0.0) return;
        }
        ok = false;
    });
    return ok;
}

}  // namespace oracle
