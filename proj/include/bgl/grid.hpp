#pragma once

#include <bgl/errors.hpp>

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace bgl {

class Grid {
public:
    Grid() = default;
    Grid(double left, double right, std::size_t steps) : left_(left), right_(right), steps_(steps) {
        if (!(std::isfinite(left) && std::isfinite(right)) || !(left < right))
            throw DomainError("grid: need finite left < right");
        if (steps < 1) throw DomainError("grid: steps must be >= 1");
    }

    double left() const { return left_; }
    double right() const { return right_; }
    std::size_t steps() const { return steps_; }
    std::size_t points() const { return steps_ + 1; }
    double h() const { return (right_ - left_) / static_cast<double>(steps_); }

    double x(std::size_t i) const {
        if (i == steps_) return right_;
        return left_ + static_cast<double>(i) * h();
    }

    // Index of a grid-aligned abscissa; tolerance is a tiny fraction of h.
    std::size_t index_of(double x, double rel_tol = 1e-9) const {
        const double u = (x - left_) / h();
        const double r = std::round(u);
        if (!std::isfinite(u) || std::abs(u - r) > rel_tol * std::max(1.0, std::abs(u)) || r < 0 ||
            r > static_cast<double>(steps_)) {
            std::ostringstream os;
            os << std::setprecision(17) << "abscissa " << x << " is not a point of grid [" << left_
               << ", " << right_ << "] with " << steps_ << " steps";
            throw GridAlignmentError(os.str());
        }
        return static_cast<std::size_t>(r);
    }

    bool contains_point(double x, double rel_tol = 1e-9) const {
        try {
            (void)index_of(x, rel_tol);
            return true;
        } catch (const GridAlignmentError&) {
            return false;
        }
    }

    // Nearest grid index, ties toward -infinity.
    std::size_t nearest_index(double x) const {
        double u = (x - left_) / h();
        if (u <= 0) return 0;
        if (u >= static_cast<double>(steps_)) return steps_;
        const double f = std::floor(u);
        const std::size_t i = static_cast<std::size_t>(f);
        return (u - f > 0.5) ? i + 1 : i;
    }

    // Sub-grid between two indices; shares points exactly with this grid.
    Grid sub(std::size_t i0, std::size_t i1) const {
        if (!(i0 < i1) || i1 > steps_) throw DomainError("grid: invalid sub-range");
        return Grid(x(i0), x(i1), i1 - i0);
    }

    bool operator==(const Grid& o) const {
        return left_ == o.left_ && right_ == o.right_ && steps_ == o.steps_;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    double left_ = 0.0;
    double right_ = 1.0;
    std::size_t steps_ = 1;
};

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(Grid g, double fill = 0.0) : grid_(g), values_(g.points(), fill) {}
    GridFunction(Grid g, std::vector<double> v, bool allow_neg_inf = false)
        : grid_(g), values_(std::move(v)) {
        if (values_.size() != grid_.points())
            throw DomainError("grid function: value count does not match grid");
        for (double y : values_) {
            if (std::isfinite(y)) continue;
            if (allow_neg_inf && y == -std::numeric_limits<double>::infinity()) continue;
            throw DomainError("grid function: non-finite value");
        }
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double at(double x) const { return values_[grid_.index_of(x)]; }

    void write_csv(std::ostream& os, bool header = true) const {
        if (header) os << "x,value\n";
        os << std::setprecision(17);
        for (std::size_t i = 0; i < values_.size(); ++i) os << grid_.x(i) << ',' << values_[i] << '\n';
    }

    // Restriction to a sub-grid given by indices.
    GridFunction restrict(std::size_t i0, std::size_t i1) const {
        Grid g = grid_.sub(i0, i1);
        std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(i0),
                              values_.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
        GridFunction out(g);
        out.values_ = std::move(v);
        return out;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

}  // namespace bgl
