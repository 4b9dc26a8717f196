#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "splitting/geometry.hpp"
#include "splitting/types.hpp"

namespace splitting {

enum class SingleValuedKind { Zero, LinearMonotone, Rotation2D, ScaledIdentity, AffineGradient, Custom };
enum class SetValuedKind {
    Zero,
    NormalConeBox,
    NormalConeBall,
    NormalConeHalfspace,
    NormalConeAffine,
    L1Subdifferential,
    LinearMonotone
};

constexpr std::string_view to_string(SingleValuedKind k) {
    switch (k) {
        case SingleValuedKind::Zero: return "Zero";
        case SingleValuedKind::LinearMonotone: return "LinearMonotone";
        case SingleValuedKind::Rotation2D: return "Rotation2D";
        case SingleValuedKind::ScaledIdentity: return "ScaledIdentity";
        case SingleValuedKind::AffineGradient: return "AffineGradient";
        case SingleValuedKind::Custom: return "Custom";
    }
    return "?";
}

constexpr std::string_view to_string(SetValuedKind k) {
    switch (k) {
        case SetValuedKind::Zero: return "Zero";
        case SetValuedKind::NormalConeBox: return "NormalConeBox";
        case SetValuedKind::NormalConeBall: return "NormalConeBall";
        case SetValuedKind::NormalConeHalfspace: return "NormalConeHalfspace";
        case SetValuedKind::NormalConeAffine: return "NormalConeAffine";
        case SetValuedKind::L1Subdifferential: return "L1Subdifferential";
        case SetValuedKind::LinearMonotone: return "LinearMonotone";
    }
    return "?";
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration with a Rayleigh-quotient stopping rule.
template <typename Scalar>
Scalar power_iteration_max_eig(const Matrix<Scalar>& Q, int max_iter = 100000, Scalar rtol = Scalar(1e-15)) {
    const Eigen::Index n = Q.rows();
    if (n == 0 || Q.isZero(0)) return Scalar(0);
    // Deterministic start with all components nonzero and no symmetry.
    Vector<Scalar> u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = Scalar(1) + Scalar(i) / Scalar(n + 1);
    u.normalize();
    Scalar lambda = u.dot(Q * u);
    for (int it = 0; it < max_iter; ++it) {
        Vector<Scalar> next = Q * u;
        const Scalar nn = next.norm();
        if (nn == Scalar(0)) return Scalar(0);
        next /= nn;
        const Scalar updated = next.dot(Q * next);
        using std::abs;
        const bool done = abs(updated - lambda) <= rtol * abs(updated) && (next - u).norm() <= Scalar(1e-12);
        u = std::move(next);
        lambda = updated;
        if (done) break;
    }
    return lambda;
}

/// Single-valued monotone operator (A, A1, A2). Instances are immutable.
template <typename Scalar>
class SingleValuedOp {
public:
    using VectorType = Vector<Scalar>;
    using MatrixType = Matrix<Scalar>;
    using Rule = std::function<VectorType(const VectorType&)>;

    static SingleValuedOp zero(Eigen::Index dim) {
        SingleValuedOp op(SingleValuedKind::Zero, dim);
        op.beta_ = infinity<Scalar>();
        op.lipschitz_ = Scalar(0);
        return op;
    }

    /// The pi/2 rotation [[0, 1], [-1, 0]] on R^2: monotone, 1-Lipschitz, not cocoercive.
    static SingleValuedOp rotation2d() {
        SingleValuedOp op(SingleValuedKind::Rotation2D, 2);
        op.lipschitz_ = Scalar(1);
        return op;
    }

    static SingleValuedOp scaled_identity(Eigen::Index dim, Scalar c) {
        if (!(c >= Scalar(0)) || !std::isfinite(static_cast<double>(c))) {
            throw ConfigError("ScaledIdentity: scale must be finite and >= 0");
        }
        SingleValuedOp op(SingleValuedKind::ScaledIdentity, dim);
        op.scale_ = c;
        op.beta_ = c > Scalar(0) ? Scalar(1) / c : infinity<Scalar>();
        op.lipschitz_ = c;
        return op;
    }

    /// x -> M x + offset. The symmetric part of M must be positive semidefinite.
    static SingleValuedOp linear(MatrixType M, VectorType offset = VectorType()) {
        if (M.rows() != M.cols() || M.rows() == 0) throw ConfigError("LinearMonotone: matrix must be square");
        require_finite(M, "LinearMonotone matrix");
        if (offset.size() == 0) offset = VectorType::Zero(M.rows());
        require_dim(offset, M.rows(), "LinearMonotone offset");
        require_finite(offset, "LinearMonotone offset");
        const MatrixType sym = (M + M.transpose()) / Scalar(2);
        Eigen::SelfAdjointEigenSolver<MatrixType> es(sym, Eigen::EigenvaluesOnly);
        const Scalar mnorm = M.norm();
        if (es.eigenvalues().minCoeff() < -Scalar(1e-12) * std::max(Scalar(1), mnorm)) {
            throw ConfigError("LinearMonotone: matrix is not monotone (symmetric part has a negative eigenvalue)");
        }
        SingleValuedOp op(SingleValuedKind::LinearMonotone, M.rows());
        Eigen::JacobiSVD<MatrixType> svd(M);
        op.lipschitz_ = svd.singularValues()(0);
        if (M == M.transpose()) {
            const Scalar lmax = es.eigenvalues().maxCoeff();
            op.beta_ = lmax > Scalar(0) ? Scalar(1) / lmax : infinity<Scalar>();
        }
        op.matrix_ = std::move(M);
        op.vector_ = std::move(offset);
        return op;
    }

    /// Gradient of 1/2 x'Qx - b'x, i.e. x -> Q x - b, with Q symmetric PSD.
    /// beta = 1/lambda_max(Q), obtained by power iteration.
    static SingleValuedOp affine_gradient(MatrixType Q, VectorType b) {
        if (Q.rows() != Q.cols() || Q.rows() == 0) throw ConfigError("AffineGradient: matrix must be square");
        require_dim(b, Q.rows(), "AffineGradient vector");
        require_finite(Q, "AffineGradient matrix");
        require_finite(b, "AffineGradient vector");
        if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * std::max(Scalar(1), Q.norm())) {
            throw ConfigError("AffineGradient: matrix must be symmetric");
        }
        Eigen::SelfAdjointEigenSolver<MatrixType> es(Q, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -Scalar(1e-12) * std::max(Scalar(1), Q.norm())) {
            throw ConfigError("AffineGradient: matrix must be positive semidefinite");
        }
        SingleValuedOp op(SingleValuedKind::AffineGradient, Q.rows());
        const Scalar lmax = power_iteration_max_eig<Scalar>(Q);
        op.beta_ = lmax > Scalar(0) ? Scalar(1) / lmax : infinity<Scalar>();
        op.lipschitz_ = lmax;
        op.matrix_ = std::move(Q);
        op.vector_ = std::move(b);
        return op;
    }

    /// User-supplied rule. Uniform continuity cannot be checked; the caller
    /// declares whether the rule may serve as A2.
    static SingleValuedOp custom(Eigen::Index dim, Rule rule, bool usable_as_a2) {
        if (!rule) throw ConfigError("Custom: empty evaluation rule");
        SingleValuedOp op(SingleValuedKind::Custom, dim);
        op.rule_ = std::move(rule);
        op.usable_as_a2_ = usable_as_a2;
        return op;
    }

    SingleValuedOp with_cocoercivity(Scalar beta) const {
        if (!(beta > Scalar(0))) throw ConfigError("cocoercivity constant must be positive");
        SingleValuedOp copy = *this;
        copy.beta_ = beta;
        return copy;
    }

    SingleValuedOp with_lipschitz(Scalar L) const {
        if (!(L >= Scalar(0))) throw ConfigError("Lipschitz constant must be >= 0");
        SingleValuedOp copy = *this;
        copy.lipschitz_ = L;
        return copy;
    }

    SingleValuedKind kind() const { return kind_; }
    Eigen::Index dim() const { return dim_; }
    const MatrixType& matrix() const { return matrix_; }
    const VectorType& vector() const { return vector_; }
    Scalar scale() const { return scale_; }
    /// Declared cocoercivity constant (+inf for constant maps); nullopt if not cocoercive.
    std::optional<Scalar> cocoercivity() const { return beta_; }
    std::optional<Scalar> lipschitz() const { return lipschitz_; }
    bool usable_as_a2() const { return usable_as_a2_; }

    VectorType operator()(const VectorType& x) const {
        require_dim(x, dim_, std::string(to_string(kind_)) + " evaluation");
        switch (kind_) {
            case SingleValuedKind::Zero: return VectorType::Zero(dim_);
            case SingleValuedKind::Rotation2D: return VectorType{{x(1), -x(0)}};
            case SingleValuedKind::ScaledIdentity: return scale_ * x;
            case SingleValuedKind::LinearMonotone: return matrix_ * x + vector_;
            case SingleValuedKind::AffineGradient: return matrix_ * x - vector_;
            case SingleValuedKind::Custom: {
                VectorType out = rule_(x);
                require_dim(out, dim_, "Custom evaluation result");
                return out;
            }
        }
        throw UnsupportedError("unknown single-valued kind");
    }

private:
    SingleValuedOp(SingleValuedKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {
        if (dim <= 0) throw ConfigError("operator dimension must be positive");
    }

    SingleValuedKind kind_;
    Eigen::Index dim_;
    MatrixType matrix_;
    VectorType vector_;
    Scalar scale_{0};
    Rule rule_;
    std::optional<Scalar> beta_;
    std::optional<Scalar> lipschitz_;
    bool usable_as_a2_{true};
};

template <typename Scalar>
Vector<Scalar> eval_single(const SingleValuedOp<Scalar>& op, const Vector<Scalar>& x) {
    return op(x);
}

/// Maximal monotone operator B accessed only through its resolvent.
template <typename Scalar>
class SetValuedOp {
public:
    using VectorType = Vector<Scalar>;
    using MatrixType = Matrix<Scalar>;

    static SetValuedOp zero(Eigen::Index dim) { return SetValuedOp(SetValuedKind::Zero, dim); }

    static SetValuedOp box(VectorType lo, VectorType hi) {
        require_dim(hi, lo.size(), "NormalConeBox hi");
        if ((lo.array() > hi.array()).any()) throw ConfigError("NormalConeBox: lo must not exceed hi");
        if (lo.array().isNaN().any() || hi.array().isNaN().any()) throw ConfigError("NormalConeBox: NaN bound");
        SetValuedOp op(SetValuedKind::NormalConeBox, lo.size());
        op.a_ = std::move(lo);
        op.b_ = std::move(hi);
        return op;
    }

    static SetValuedOp ball(VectorType center, Scalar radius) {
        require_finite(center, "NormalConeBall center");
        if (!(radius >= Scalar(0))) throw ConfigError("NormalConeBall: radius must be >= 0");
        SetValuedOp op(SetValuedKind::NormalConeBall, center.size());
        op.a_ = std::move(center);
        op.scalar_ = radius;
        return op;
    }

    static SetValuedOp halfspace(VectorType v, VectorType y, Scalar r) {
        require_dim(y, v.size(), "NormalConeHalfspace anchor");
        require_finite(v, "NormalConeHalfspace normal");
        require_finite(y, "NormalConeHalfspace anchor");
        if (v.squaredNorm() == Scalar(0)) throw ConfigError("NormalConeHalfspace: normal must be nonzero");
        SetValuedOp op(SetValuedKind::NormalConeHalfspace, v.size());
        op.a_ = std::move(v);
        op.b_ = std::move(y);
        op.scalar_ = r;
        return op;
    }

    /// Normal cone of {x : E x = d}. The system must be consistent.
    static SetValuedOp affine(MatrixType E, VectorType d) {
        require_dim(d, E.rows(), "NormalConeAffine rhs");
        require_finite(E, "NormalConeAffine matrix");
        require_finite(d, "NormalConeAffine rhs");
        SetValuedOp op(SetValuedKind::NormalConeAffine, E.cols());
        op.cod_ = Eigen::CompleteOrthogonalDecomposition<MatrixType>(E);
        const VectorType p = op.cod_.solve(d);
        using std::max;
        if ((E * p - d).norm() > Scalar(1e-9) * max(Scalar(1), d.norm())) {
            throw ConfigError("NormalConeAffine: E x = d has no solution");
        }
        op.m_ = std::move(E);
        op.b_ = std::move(d);
        return op;
    }

    static SetValuedOp l1(Eigen::Index dim, Scalar weight) {
        if (!(weight >= Scalar(0))) throw ConfigError("L1Subdifferential: weight must be >= 0");
        SetValuedOp op(SetValuedKind::L1Subdifferential, dim);
        op.scalar_ = weight;
        return op;
    }

    static SetValuedOp linear(MatrixType M) {
        if (M.rows() != M.cols() || M.rows() == 0) throw ConfigError("LinearMonotone: matrix must be square");
        require_finite(M, "LinearMonotone matrix");
        const MatrixType sym = (M + M.transpose()) / Scalar(2);
        Eigen::SelfAdjointEigenSolver<MatrixType> es(sym, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -Scalar(1e-12) * std::max(Scalar(1), M.norm())) {
            throw ConfigError("LinearMonotone: matrix is not monotone");
        }
        SetValuedOp op(SetValuedKind::LinearMonotone, M.rows());
        op.m_ = std::move(M);
        return op;
    }

    SetValuedKind kind() const { return kind_; }
    Eigen::Index dim() const { return dim_; }
    bool is_normal_cone() const {
        return kind_ == SetValuedKind::NormalConeBox || kind_ == SetValuedKind::NormalConeBall ||
               kind_ == SetValuedKind::NormalConeHalfspace || kind_ == SetValuedKind::NormalConeAffine;
    }

    // Raw data, interpreted per kind.
    const VectorType& lo() const { return a_; }
    const VectorType& hi() const { return b_; }
    const VectorType& center() const { return a_; }
    Scalar radius() const { return scalar_; }
    const VectorType& normal() const { return a_; }
    const VectorType& anchor() const { return b_; }
    Scalar offset() const { return scalar_; }
    const MatrixType& matrix() const { return m_; }
    const VectorType& rhs() const { return b_; }
    Scalar weight() const { return scalar_; }

    /// J_{alpha B}(x) = (I + alpha B)^{-1} x.
    VectorType resolvent(Scalar alpha, const VectorType& x) const {
        if (!(alpha > Scalar(0))) throw ConfigError("resolvent: alpha must be positive");
        require_dim(x, dim_, std::string(to_string(kind_)) + " resolvent");
        switch (kind_) {
            case SetValuedKind::Zero: return x;
            case SetValuedKind::NormalConeBox: return x.cwiseMax(a_).cwiseMin(b_);
            case SetValuedKind::NormalConeBall: {
                const VectorType d = x - a_;
                const Scalar n = d.norm();
                if (n <= scalar_) return x;
                return a_ + (scalar_ / n) * d;
            }
            case SetValuedKind::NormalConeHalfspace:
                return project_halfspace(Halfspace<Scalar>{a_, b_, scalar_}, x);
            case SetValuedKind::NormalConeAffine: return x - cod_.solve(m_ * x - b_);
            case SetValuedKind::L1Subdifferential: {
                const Scalar t = alpha * scalar_;
                return x.unaryExpr([t](Scalar v) {
                    using std::abs;
                    const Scalar mag = abs(v) - t;
                    if (mag <= Scalar(0)) return Scalar(0);
                    return v > Scalar(0) ? mag : -mag;
                });
            }
            case SetValuedKind::LinearMonotone: {
                const MatrixType K = MatrixType::Identity(dim_, dim_) + alpha * m_;
                Eigen::PartialPivLU<MatrixType> lu(K);
                if (!(lu.rcond() > Scalar(1e-14))) {
                    throw NumericalError("resolvent: I + alpha M is numerically singular");
                }
                return lu.solve(x);
            }
        }
        throw UnsupportedError("unknown set-valued kind");
    }

private:
    SetValuedOp(SetValuedKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {
        if (dim <= 0) throw ConfigError("operator dimension must be positive");
    }

    SetValuedKind kind_;
    Eigen::Index dim_;
    VectorType a_;
    VectorType b_;
    Scalar scalar_{0};
    MatrixType m_;
    Eigen::CompleteOrthogonalDecomposition<MatrixType> cod_;
};

template <typename Scalar>
Vector<Scalar> resolvent(const SetValuedOp<Scalar>& op, Scalar alpha, const Vector<Scalar>& x) {
    return op.resolvent(alpha, x);
}

template <typename Scalar>
using SamplePairs = std::vector<std::pair<Vector<Scalar>, Vector<Scalar>>>;

/// Extreme value observed over a sample together with the verdict.
template <typename Scalar>
struct SampledCheck {
    Scalar value{0};
    bool pass{false};
};

/// max over pairs of ||Jx-Jy||^2 + ||(I-J)x-(I-J)y||^2 - ||x-y||^2; pass iff <= 1e-10.
template <typename Scalar>
SampledCheck<Scalar> check_firm_nonexpansiveness(const SetValuedOp<Scalar>& op, Scalar alpha,
                                                 const SamplePairs<Scalar>& pairs) {
    if (pairs.empty()) throw ConfigError("check_firm_nonexpansiveness: empty sample");
    Scalar worst = -infinity<Scalar>();
    for (const auto& [x, y] : pairs) {
        const Vector<Scalar> jx = op.resolvent(alpha, x);
        const Vector<Scalar> jy = op.resolvent(alpha, y);
        const Scalar v = (jx - jy).squaredNorm() + ((x - jx) - (y - jy)).squaredNorm() - (x - y).squaredNorm();
        worst = std::max(worst, v);
    }
    return {worst, worst <= Scalar(1e-10)};
}

/// min over pairs of <Ax - Ay, x - y>; pass iff >= -1e-12.
template <typename Scalar>
SampledCheck<Scalar> check_monotone_sampled(const SingleValuedOp<Scalar>& op, const SamplePairs<Scalar>& pairs) {
    if (pairs.empty()) throw ConfigError("check_monotone_sampled: empty sample");
    Scalar lowest = infinity<Scalar>();
    for (const auto& [x, y] : pairs) {
        lowest = std::min(lowest, (op(x) - op(y)).dot(x - y));
    }
    return {lowest, lowest >= Scalar(-1e-12)};
}

/// min over pairs of <Ax - Ay, x - y> - beta ||Ax - Ay||^2; pass iff >= -1e-10.
template <typename Scalar>
SampledCheck<Scalar> check_cocoercive_sampled(const SingleValuedOp<Scalar>& op, Scalar beta,
                                              const SamplePairs<Scalar>& pairs) {
    if (pairs.empty()) throw ConfigError("check_cocoercive_sampled: empty sample");
    Scalar lowest = infinity<Scalar>();
    for (const auto& [x, y] : pairs) {
        const Vector<Scalar> da = op(x) - op(y);
        const Scalar inner = da.dot(x - y);
        // beta = +inf is only admissible for constant maps.
        const Scalar penalty = da.squaredNorm() == Scalar(0) ? Scalar(0) : beta * da.squaredNorm();
        lowest = std::min(lowest, inner - penalty);
    }
    return {lowest, lowest >= Scalar(-1e-10)};
}

/// max over pairs of ||Ax - Ay|| - L ||x - y||; pass iff <= 1e-10 (scaled by ||x - y||).
template <typename Scalar>
SampledCheck<Scalar> check_lipschitz_sampled(const SingleValuedOp<Scalar>& op, Scalar L,
                                             const SamplePairs<Scalar>& pairs) {
    if (pairs.empty()) throw ConfigError("check_lipschitz_sampled: empty sample");
    Scalar worst = -infinity<Scalar>();
    for (const auto& [x, y] : pairs) {
        const Scalar dx = (x - y).norm();
        const Scalar excess = (op(x) - op(y)).norm() - L * dx;
        worst = std::max(worst, excess / std::max(Scalar(1), dx));
    }
    return {worst, worst <= Scalar(1e-10)};
}

}  // namespace splitting
