#pragma once

#include <bgl/errors.hpp>
#include <bgl/grid.hpp>
#include <bgl/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace bgl {

// Paper line 0 is stored as row 1; every conversion goes through this constant.
inline constexpr int kLineOffset = 1;

class Environment {
public:
    Environment() = default;
    Environment(int lines, Grid grid) : lines_(lines), grid_(grid), data_(static_cast<std::size_t>(lines) * grid.points(), 0.0) {
        if (lines < 1) throw DomainError("environment: need at least one line");
    }

    // Rows are Brownian motions started at 0 at grid.left(), each from its own substream.
    static Environment sample(int lines, Grid grid, const RandomStream& rng, std::uint64_t seed_key = 0) {
        Environment env(lines, grid);
        env.seed_key_ = seed_key;
        const double sd = std::sqrt(grid.h());
        for (int k = 1; k <= lines; ++k) {
            RandomStream r = rng.substream(static_cast<std::uint64_t>(k));
            double* row = env.row_ptr(k);
            row[0] = 0.0;
            for (std::size_t i = 1; i < grid.points(); ++i) row[i] = row[i - 1] + sd * r.normal();
        }
        return env;
    }

    int lines() const { return lines_; }
    const Grid& grid() const { return grid_; }
    double horizon() const { return grid_.right(); }
    std::uint64_t seed_key() const { return seed_key_; }

    double operator()(int row, std::size_t i) const { return data_[offset(row) + i]; }
    double& operator()(int row, std::size_t i) { return data_[offset(row) + i]; }
    const double* row_ptr(int row) const { return data_.data() + offset(row); }
    double* row_ptr(int row) { return data_.data() + offset(row); }

    // Exact dyadic refinement: midpoints drawn from Brownian bridges between existing values.
    Environment refined(RandomStream& rng) const {
        Environment out(lines_, Grid(grid_.left(), grid_.right(), grid_.steps() * 2));
        out.seed_key_ = seed_key_;
        const double sd = std::sqrt(grid_.h() / 4);
        for (int k = 1; k <= lines_; ++k)
            for (std::size_t i = 0; i < grid_.points(); ++i) {
                out(k, 2 * i) = (*this)(k, i);
                if (i + 1 < grid_.points())
                    out(k, 2 * i + 1) = 0.5 * ((*this)(k, i) + (*this)(k, i + 1)) + sd * rng.normal();
            }
        return out;
    }

    void write_binary(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + path);
        const char magic[8] = {'B', 'G', 'L', 'E', 'N', 'V', '0', '1'};
        os.write(magic, 8);
        const std::int64_t n = lines_;
        const std::uint64_t steps = grid_.steps();
        const double l = grid_.left(), r = grid_.right();
        os.write(reinterpret_cast<const char*>(&n), sizeof n);
        os.write(reinterpret_cast<const char*>(&r), sizeof r);
        os.write(reinterpret_cast<const char*>(&steps), sizeof steps);
        os.write(reinterpret_cast<const char*>(&seed_key_), sizeof seed_key_);
        os.write(reinterpret_cast<const char*>(&l), sizeof l);
        os.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(double)));
    }

    static Environment read_binary(const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open " + path);
        char magic[8];
        is.read(magic, 8);
        if (std::string(magic, 8) != "BGLENV01") throw std::runtime_error("not an environment file: " + path);
        std::int64_t n;
        std::uint64_t steps, key;
        double l, r;
        is.read(reinterpret_cast<char*>(&n), sizeof n);
        is.read(reinterpret_cast<char*>(&r), sizeof r);
        is.read(reinterpret_cast<char*>(&steps), sizeof steps);
        is.read(reinterpret_cast<char*>(&key), sizeof key);
        is.read(reinterpret_cast<char*>(&l), sizeof l);
        Environment env(static_cast<int>(n), Grid(l, r, steps));
        env.seed_key_ = key;
        is.read(reinterpret_cast<char*>(env.data_.data()), static_cast<std::streamsize>(env.data_.size() * sizeof(double)));
        if (!is) throw std::runtime_error("truncated environment file: " + path);
        return env;
    }

    void write_csv(std::ostream& os) const {
        os << "x";
        for (int k = 1; k <= lines_; ++k) os << ",B" << k;
        os << '\n' << std::setprecision(17);
        for (std::size_t i = 0; i < grid_.points(); ++i) {
            os << grid_.x(i);
            for (int k = 1; k <= lines_; ++k) os << ',' << (*this)(k, i);
            os << '\n';
        }
    }

private:
    std::size_t offset(int row) const {
        if (row < 1 || row > lines_) throw DomainError("environment: row out of range");
        return static_cast<std::size_t>(row - 1) * grid_.points();
    }

    int lines_ = 0;
    Grid grid_;
    std::vector<double> data_;
    std::uint64_t seed_key_ = 0;
};

// M[(x,i) -> (Y,j)] for every grid x <= Y at once. Entries beyond Y are -inf.
// Backward recursion W_k(s) = -B(k,s) + max_{t in [s,Y]} (B(k,t) + W_{k+1}(t)).
inline std::vector<double> last_passage_to_point(const Environment& env, int i, std::size_t iy, int j) {
    if (i > j) throw DomainError("last_passage: need i <= j");
    if (i < 1 || j > env.lines()) throw DomainError("last_passage: line index outside environment");
    const std::size_t np = env.grid().points();
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> w(np, ninf);
    const double* bj = env.row_ptr(j);
    for (std::size_t s = 0; s <= iy; ++s) w[s] = bj[iy] - bj[s];
    for (int k = j - 1; k >= i; --k) {
        const double* b = env.row_ptr(k);
        double run = ninf;
        for (std::size_t s = iy + 1; s-- > 0;) {
            run = std::max(run, b[s] + w[s]);
            w[s] = run - b[s];
        }
    }
    return w;
}

struct LatticePoint {
    double x;
    int line;
};

inline double last_passage(const Environment& env, LatticePoint start, LatticePoint end) {
    if (start.line > end.line) throw DomainError("last_passage: need i <= j");
    if (start.x > end.x) throw DomainError("last_passage: need x <= y");
    const std::size_t ix = env.grid().index_of(start.x);
    const std::size_t iy = env.grid().index_of(end.x);
    return last_passage_to_point(env, start.line, iy, end.line)[ix];
}

struct ScaledCoords {
    std::size_t ix;
    std::size_t iy;
};

inline double kpz_width(int n) { return 2.0 * std::pow(static_cast<double>(n), 2.0 / 3.0); }

inline ScaledCoords scaled_indices(const Environment& env, int n, double x, double y) {
    if (n < 1) throw DomainError("scaled weight: n must be >= 1");
    if (env.lines() < n + kLineOffset) throw DomainError("scaled weight: environment needs n+1 lines");
    const double ux = kpz_width(n) * x;
    const double uy = n + kpz_width(n) * y;
    if (ux < env.grid().left() || uy > env.grid().right() || ux > uy)
        throw DomainError("scaled weight: coordinates outside the environment horizon");
    return {env.grid().index_of(ux), env.grid().index_of(uy)};
}

inline double scale_energy(int n, double M, double x_unscaled, double y_unscaled) {
    // 2n + 2n^{2/3}(y-x) with y-x read back from unscaled coordinates
    const double centre = 2.0 * n + (y_unscaled - n - x_unscaled);
    return (M - centre) / (std::numbers::sqrt2 * std::cbrt(static_cast<double>(n)));
}

inline double scaled_weight(const Environment& env, int n, double x, double y) {
    const auto c = scaled_indices(env, n, x, y);
    const auto w = last_passage_to_point(env, 0 + kLineOffset, c.iy, n + kLineOffset);
    return scale_energy(n, w[c.ix], env.grid().x(c.ix), env.grid().x(c.iy));
}

class RewardFunction {
public:
    struct Psi {
        double psi1, psi2, psi3;
    };

    RewardFunction(GridFunction f, Psi psi) : f_(std::move(f)), psi_(psi) {
        if (!(psi.psi1 > 0 && psi.psi2 > 0 && psi.psi3 > 0)) throw DomainError("reward: Psi entries must be positive");
        const Grid& g = f_.grid();
        bool any_finite = false;
        double sup_core = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < f_.size(); ++i) {
            const double v = f_[i], x = g.x(i);
            if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
                throw DomainError("reward: values must be finite or -inf");
            if (v == -std::numeric_limits<double>::infinity()) continue;
            any_finite = true;
            if (v > psi.psi1 * (1 + std::abs(x))) throw DomainError("reward: f(x) exceeds Psi1(1+|x|)");
            if (std::abs(x) <= psi.psi2) sup_core = std::max(sup_core, v);
        }
        if (!any_finite) throw DomainError("reward: identically -inf");
        if (!(sup_core > -psi.psi3)) throw DomainError("reward: sup over [-Psi2,Psi2] must exceed -Psi3");
    }

    const GridFunction& values() const { return f_; }
    const Grid& grid() const { return f_.grid(); }
    Psi psi() const { return psi_; }
    double operator[](std::size_t i) const { return f_[i]; }

private:
    GridFunction f_;
    Psi psi_;
};

// Reward grid matched index-for-index to the environment grid under x -> 2n^{2/3} x.
inline Grid reward_grid(const Environment& env, int n) {
    const double w = kpz_width(n);
    return Grid(env.grid().left() / w, env.grid().right() / w, env.grid().steps());
}

struct RewardedResult {
    double weight;
    std::size_t argmax_index;
    double argmax;
};

inline RewardedResult f_rewarded(const Environment& env, int n, const RewardFunction& f, double y) {
    if (f.grid().steps() != env.grid().steps())
        throw DomainError("f-rewarded: reward grid must match the environment grid");
    const Grid rg = reward_grid(env, n);
    if (std::abs(f.grid().left() - rg.left()) > 1e-12 * std::max(1.0, std::abs(rg.left())) ||
        std::abs(f.grid().right() - rg.right()) > 1e-12 * std::max(1.0, std::abs(rg.right())))
        throw DomainError("f-rewarded: reward grid is not the scaled environment grid");
    const double uy = n + kpz_width(n) * y;
    if (uy > env.grid().right() || uy < env.grid().left()) throw DomainError("f-rewarded: y outside the horizon");
    if (env.lines() < n + kLineOffset) throw DomainError("f-rewarded: environment needs n+1 lines");
    const std::size_t iy = env.grid().index_of(uy);
    const auto w = last_passage_to_point(env, 0 + kLineOffset, iy, n + kLineOffset);
    const double yu = env.grid().x(iy);
    RewardedResult best{-std::numeric_limits<double>::infinity(), 0, 0.0};
    bool found = false;
    // x <= n^{1/3}/2 + y is exactly x_unscaled <= y_unscaled
    for (std::size_t i = 0; i <= iy; ++i) {
        const double fv = f[i];
        if (fv == -std::numeric_limits<double>::infinity()) continue;
        const double v = scale_energy(n, w[i], env.grid().x(i), yu) + fv;
        if (!found || v > best.weight) {
            best = {v, i, f.grid().x(i)};
            found = true;
        }
    }
    if (!found) throw DomainError("f-rewarded: reward is -inf on the admissible range");
    return best;
}

inline double f_rewarded_weight(const Environment& env, int n, const RewardFunction& f, double y) {
    return f_rewarded(env, n, f, y).weight;
}

inline double polymer_argmax(const Environment& env, int n, const RewardFunction& f, double y) {
    return f_rewarded(env, n, f, y).argmax;
}

// Q(x) = 2^{-1/2} x^2 and its tangent line at y.
inline double parabola_q(double x) { return x * x / std::numbers::sqrt2; }
inline double tangent_l(double x, double y) {
    return -y * y / std::numbers::sqrt2 - std::numbers::sqrt2 * y * (x - y);
}

}  // namespace bgl
