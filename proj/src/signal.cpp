#include "cognet/signal.hpp"

#include <algorithm>
#include <cstring>

namespace cognet {

SignalSpace SignalSpace::reals(int width) {
    if (width < 1) throw SignalError("signal width must be positive");
    SignalSpace s;
    s.blocks_.push_back({SpaceKind::RealVec, width, 1.0, {}});
    s.order_.assign(width, OrderMode::Ascending);
    s.width_ = width;
    return s;
}

SignalSpace SignalSpace::finite_set(std::vector<std::string> universe) {
    if (universe.empty()) throw SignalError("set universe must be non-empty");
    SignalSpace s;
    int w = static_cast<int>(universe.size());
    s.blocks_.push_back({SpaceKind::FiniteSet, w, 1.0, std::move(universe)});
    s.order_.assign(w, OrderMode::Ascending); // inclusion on indicators
    s.width_ = w;
    return s;
}

SignalSpace SignalSpace::distribution(std::vector<std::string> outcomes) {
    if (outcomes.empty()) throw SignalError("outcome set must be non-empty");
    SignalSpace s;
    int w = static_cast<int>(outcomes.size());
    s.blocks_.push_back({SpaceKind::Distribution, w, 0.5, std::move(outcomes)});
    s.width_ = w; // order_ left empty: unordered
    return s;
}

SignalSpace SignalSpace::product(const SignalSpace& fwd, const SignalSpace& bwd) {
    SignalSpace s;
    for (const auto& b : fwd.blocks_) s.blocks_.push_back(b);
    for (const auto& b : bwd.blocks_) s.blocks_.push_back(b);
    s.width_ = fwd.width_ + bwd.width_;
    if (fwd.has_order() && bwd.has_order()) {
        s.order_ = fwd.order_;
        s.order_.insert(s.order_.end(), bwd.order_.begin(), bwd.order_.end());
    }
    return s;
}

double SignalSpace::distance(std::span<const double> a, std::span<const double> b) const {
    if (static_cast<int>(a.size()) != width_ || static_cast<int>(b.size()) != width_)
        throw SignalError("signal width mismatch");
    double total = 0.0;
    int at = 0;
    for (const auto& blk : blocks_) {
        double d = 0.0;
        for (int i = 0; i < blk.width; ++i)
            d += std::abs(a[at + i] - b[at + i]);
        total += blk.metric_scale * d;
        at += blk.width;
    }
    return total;
}

bool SignalSpace::less(std::span<const double> a, std::span<const double> b) const {
    if (!has_order()) throw SignalError("space has no order");
    if (static_cast<int>(a.size()) != width_ || static_cast<int>(b.size()) != width_)
        throw SignalError("signal width mismatch");
    bool strict = false;
    for (int i = 0; i < width_; ++i) {
        switch (order_[i]) {
        case OrderMode::Ascending:
            if (a[i] > b[i]) return false;
            if (a[i] < b[i]) strict = true;
            break;
        case OrderMode::EqualOnly:
            if (a[i] != b[i]) return false;
            break;
        }
    }
    return strict;
}

void SignalSpace::set_order_mode(int component, OrderMode m) {
    if (order_.empty()) throw SignalError("space has no order to adjust");
    order_.at(component) = m;
}

std::optional<double> SignalSpace::measure(std::span<const double> a) const {
    if (blocks_.size() != 1 || blocks_[0].kind != SpaceKind::FiniteSet)
        return std::nullopt;
    double m = 0.0;
    for (double x : a) m += x;
    return m;
}

bool SignalSpace::operator==(const SignalSpace& other) const {
    if (width_ != other.width_ || blocks_.size() != other.blocks_.size())
        return false;
    for (size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].kind != other.blocks_[i].kind ||
            blocks_[i].width != other.blocks_[i].width)
            return false;
    return order_ == other.order_;
}

SignalVector::SignalVector(SpacePtr space, std::vector<ArcId> arcs)
    : space_(std::move(space)), arcs_(std::move(arcs)) {
    if (!space_) throw SignalError("null signal space");
    std::sort(arcs_.begin(), arcs_.end());
    if (std::adjacent_find(arcs_.begin(), arcs_.end()) != arcs_.end())
        throw SignalError("duplicate arc in signal vector index set");
    data_.assign(arcs_.size() * space_->width(), 0.0);
}

int SignalVector::offset(ArcId e) const {
    auto it = std::lower_bound(arcs_.begin(), arcs_.end(), e);
    if (it == arcs_.end() || *it != e) return -1;
    return static_cast<int>(it - arcs_.begin()) * space_->width();
}

bool SignalVector::has_arc(ArcId e) const { return offset(e) >= 0; }

std::span<double> SignalVector::at(ArcId e) {
    int off = offset(e);
    if (off < 0) throw SignalError("arc " + std::to_string(e) + " not in vector domain");
    return {data_.data() + off, static_cast<size_t>(space_->width())};
}

std::span<const double> SignalVector::at(ArcId e) const {
    int off = offset(e);
    if (off < 0) throw SignalError("arc " + std::to_string(e) + " not in vector domain");
    return {data_.data() + off, static_cast<size_t>(space_->width())};
}

void SignalVector::set(ArcId e, std::span<const double> value) {
    auto dst = at(e);
    if (value.size() != dst.size()) throw SignalError("signal width mismatch in set()");
    std::copy(value.begin(), value.end(), dst.begin());
}

void SignalVector::set(ArcId e, double scalar) {
    auto dst = at(e);
    if (dst.size() != 1) throw SignalError("scalar set() on non-scalar signal");
    dst[0] = scalar;
}

SignalVector SignalVector::subvector(const std::vector<ArcId>& sub) const {
    SignalVector out(space_, sub);
    for (ArcId e : sub) out.set(e, at(e));
    return out;
}

bool SignalVector::same_domain(const SignalVector& other) const {
    return arcs_ == other.arcs_ && space_ && other.space_ && *space_ == *other.space_;
}

bool SignalVector::operator==(const SignalVector& other) const {
    return same_domain(other) && data_ == other.data_;
}

double rho_set(const SignalVector& x, const SignalVector& y) {
    if (!x.same_domain(y))
        throw SignalError("rho_set: index sets or spaces differ");
    double total = 0.0;
    for (ArcId e : x.arcs())
        total += x.space()->distance(x.at(e), y.at(e));
    return total;
}

SignalVector concat(const SignalVector& a, const SignalVector& b) {
    if (!a.space_ || !b.space_ || !(*a.space_ == *b.space_))
        throw SignalError("concat: spaces differ");
    std::vector<ArcId> arcs = a.arcs_;
    for (ArcId e : b.arcs_)
        if (a.has_arc(e))
            throw SignalError("concat: overlapping index sets at arc " + std::to_string(e));
    arcs.insert(arcs.end(), b.arcs_.begin(), b.arcs_.end());
    SignalVector out(a.space_, std::move(arcs));
    for (ArcId e : a.arcs_) out.set(e, a.at(e));
    for (ArcId e : b.arcs_) out.set(e, b.at(e));
    return out;
}

SignalVector splice(const SignalVector& a, const SignalVector& b) {
    if (!a.space_ || !b.space_ || !(*a.space_ == *b.space_))
        throw SignalError("splice: spaces differ");
    SignalVector out = a;
    for (ArcId e : a.arcs_)
        if (b.has_arc(e)) out.set(e, b.at(e));
    return out;
}

} // namespace cognet
