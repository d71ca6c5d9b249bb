#pragma once
// Signal spaces and arc-indexed signal vectors.
//
// A signal is a fixed-width block of doubles whose interpretation depends on
// the space: real vector (L1 distance, componentwise order), finite subset of
// a declared universe (indicator components, counting measure, distance =
// measure of the symmetric difference, order by inclusion), or empirical
// distribution over a finite outcome set (total-variation distance, no
// order). Two-way networks use a product of two spaces on each arc.

#include "cognet/graph.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cognet {

using Signal = std::vector<double>;

enum class SpaceKind { RealVec, FiniteSet, Distribution };

// How one component participates in the partial order.
//   Ascending — larger is greater
//   EqualOnly — comparable only when equal (used for price components)
enum class OrderMode { Ascending, EqualOnly };

struct SpaceBlock {
    SpaceKind kind = SpaceKind::RealVec;
    int width = 1;
    double metric_scale = 1.0; // 0.5 for total variation
    std::vector<std::string> labels; // universe / outcome names, may be empty
};

class SignalError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SignalSpace {
public:
    static SignalSpace reals(int width);
    static SignalSpace finite_set(std::vector<std::string> universe);
    static SignalSpace distribution(std::vector<std::string> outcomes);
    static SignalSpace product(const SignalSpace& forward, const SignalSpace& backward);

    int width() const { return width_; }
    const std::vector<SpaceBlock>& blocks() const { return blocks_; }
    bool is_product() const { return blocks_.size() == 2; }
    int forward_width() const { return blocks_.front().width; }

    // rho on one signal; symmetric, nonnegative, zero iff equal.
    double distance(std::span<const double> a, std::span<const double> b) const;

    bool has_order() const { return !order_.empty(); }
    // Strict partial order; throws SignalError when the space is unordered.
    bool less(std::span<const double> a, std::span<const double> b) const;
    void set_order_mode(int component, OrderMode m);
    std::optional<OrderMode> order_mode(int component) const {
        if (order_.empty()) return std::nullopt;
        return order_.at(component);
    }

    // Counting measure; defined for single-block finite-set spaces.
    std::optional<double> measure(std::span<const double> a) const;

    bool operator==(const SignalSpace& other) const;

private:
    std::vector<SpaceBlock> blocks_;
    std::vector<OrderMode> order_; // empty => unordered
    int width_ = 0;
};

using SpacePtr = std::shared_ptr<const SignalSpace>;

// An assignment arc -> signal over one space, indexed by a sorted arc set.
class SignalVector {
public:
    SignalVector() = default;
    SignalVector(SpacePtr space, std::vector<ArcId> arcs); // zero-filled
    static SignalVector empty(SpacePtr space) { return SignalVector(std::move(space), {}); }

    const SpacePtr& space() const { return space_; }
    const std::vector<ArcId>& arcs() const { return arcs_; }
    int size() const { return static_cast<int>(arcs_.size()); }
    bool has_arc(ArcId e) const;

    std::span<double> at(ArcId e);
    std::span<const double> at(ArcId e) const;
    void set(ArcId e, std::span<const double> value);
    void set(ArcId e, double scalar); // width-1 convenience

    std::span<const double> flat() const { return data_; }
    std::span<double> flat() { return data_; }

    // x_B for B subseteq domain; unknown arc in B throws.
    SignalVector subvector(const std::vector<ArcId>& sub) const;

    bool same_domain(const SignalVector& other) const;
    bool operator==(const SignalVector& other) const;

private:
    int offset(ArcId e) const; // -1 when absent
    SpacePtr space_;
    std::vector<ArcId> arcs_; // sorted, unique
    std::vector<double> data_;
    friend SignalVector concat(const SignalVector&, const SignalVector&);
    friend SignalVector splice(const SignalVector&, const SignalVector&);
};

// rho_A(x_A, y_A) = sum over the common index set of per-arc distances.
// Domains must match exactly.
double rho_set(const SignalVector& x, const SignalVector& y);

// x_A || x_B for disjoint A, B.
SignalVector concat(const SignalVector& a, const SignalVector& b);

// x_A \ x'_B: indexed by A; arcs in the intersection take values from b.
SignalVector splice(const SignalVector& a, const SignalVector& b);

} // namespace cognet
