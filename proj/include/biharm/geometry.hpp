#pragma once

#include "biharm/jet.hpp"
#include "biharm/types.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace biharm {

using Jet = Jet2<double>;
using NestedJet = Jet2<Jet2<double>>;

/// A scalar field on R^3 that can be evaluated on plain points, on order-2
/// jets, and (optionally) on nested jets. Nested evaluation is what supplies
/// the fourth-order data needed by `manufactured_source`.
class AmbientScalarField {
public:
    using PlainFn = std::function<double(double, double, double)>;
    using JetFn = std::function<Jet(const Jet&, const Jet&, const Jet&)>;
    using NestedFn = std::function<NestedJet(const NestedJet&, const NestedJet&, const NestedJet&)>;

    AmbientScalarField() = default;
    AmbientScalarField(std::string name, PlainFn plain, JetFn jet, NestedFn nested = {});

    /// Instantiates every evaluation level from one generic callable `f(x, y, z)`.
    template <class F>
    static AmbientScalarField from(std::string name, F f) {
        return AmbientScalarField(
            std::move(name),
            [f](double x, double y, double z) { return double(f(x, y, z)); },
            [f](const Jet& x, const Jet& y, const Jet& z) { return Jet(f(x, y, z)); },
            [f](const NestedJet& x, const NestedJet& y, const NestedJet& z) {
                return NestedJet(f(x, y, z));
            });
    }

    const std::string& name() const noexcept { return name_; }
    bool has_nested() const noexcept { return static_cast<bool>(nested_); }

    double eval(double x, double y, double z) const { return plain_(x, y, z); }
    Jet eval(const Jet& x, const Jet& y, const Jet& z) const { return jet_(x, y, z); }
    NestedJet eval(const NestedJet& x, const NestedJet& y, const NestedJet& z) const;

    double operator()(const Vec3& p) const { return plain_(p.x(), p.y(), p.z()); }
    /// Value, gradient and Hessian at `p`.
    Jet jet(const Vec3& p) const;
    /// Jet whose components are themselves jets at `p` (derivatives up to order 4).
    NestedJet nested_jet(const Vec3& p) const;

private:
    std::string name_;
    PlainFn plain_;
    JetFn jet_;
    NestedFn nested_;
};

std::array<Jet, 3> jet_seed(const Vec3& p);
std::array<NestedJet, 3> nested_seed(const Vec3& p);

struct BoundingBox {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    double diagonal() const { return (hi - lo).norm(); }
    /// True when `p` lies in the box inflated by `margin` on every side.
    bool contains(const Vec3& p, double margin) const;
};

/// Closed surface given as the zero level set of `phi`.
class LevelSetSurface {
public:
    using Projector = std::function<Vec3(const Vec3&)>;

    LevelSetSurface(std::string name, AmbientScalarField phi, BoundingBox bbox,
                    Projector closed_form = {});

    const std::string& name() const noexcept { return name_; }
    const AmbientScalarField& phi() const noexcept { return phi_; }
    const BoundingBox& bbox() const noexcept { return bbox_; }
    bool has_closed_form_projection() const noexcept { return static_cast<bool>(closed_form_); }
    const Projector& closed_form_projection() const noexcept { return closed_form_; }

    /// Optional smooth map from the unit sphere onto the surface, used to
    /// carry icosphere meshes over without the distortion of a projection.
    const Projector& sphere_map() const noexcept { return sphere_map_; }
    LevelSetSurface& with_sphere_map(Projector map) {
        sphere_map_ = std::move(map);
        return *this;
    }

private:
    std::string name_;
    AmbientScalarField phi_;
    BoundingBox bbox_;
    Projector closed_form_;
    Projector sphere_map_;
};

LevelSetSurface make_sphere(double radius = 1.0);
LevelSetSurface make_torus(double major_radius = 4.0, double minor_radius = 1.0);
/// (x - z^2)^2 + y^2 + z^2 - 1 = 0
LevelSetSurface make_heart();

/// Looks up "sphere", "torus", "heart" or a surface added with `register_surface`.
LevelSetSurface surface_by_name(std::string_view name);
void register_surface(LevelSetSurface surface);
std::vector<std::string> surface_names();

/// Looks up "xy", "y_over_r", "y" or a field added with `register_solution`.
AmbientScalarField solution_by_name(std::string_view name);
void register_solution(AmbientScalarField field);

// ------------------------------------------------------------------ calculus

inline constexpr double kDegenerateGradient = 1e-14;
inline constexpr double kOnSurfaceTolerance = 1e-10;
inline constexpr int kProjectionMaxIterations = 50;

/// grad(phi)/|grad(phi)|. Throws DegenerateGradient if |grad(phi)| <= 1e-14.
Vec3 normal(const LevelSetSurface& surface, const Vec3& x);

/// Point on the surface associated with `x`: the exact closest point when a
/// closed form exists, otherwise the limit of a damped normal-flow iteration.
/// Throws NoConvergence after 50 iterations.
Vec3 project(const LevelSetSurface& surface, const Vec3& x, double tol = 1e-12);

Vec3 surface_gradient_exact(const LevelSetSurface& surface, const AmbientScalarField& u,
                            const Vec3& x);
double laplace_beltrami_exact(const LevelSetSurface& surface, const AmbientScalarField& u,
                              const Vec3& x);
/// Delta_S(Delta_S u)(x), using the level-set Laplace-Beltrami expression
/// evaluated on nested jets as the ambient extension of Delta_S u.
double manufactured_source(const LevelSetSurface& surface, const AmbientScalarField& u,
                           const Vec3& x);

/// Laplace-Beltrami expression
///   lap(u) - (grad u . n) div(n) - n^T hess(u) n,   n = grad(phi)/|grad(phi)|,
/// for the jets of `u` and `phi` at one point. With T = Jet the result is the
/// jet of that expression as a field.
template <class T>
T laplace_beltrami_formula(const Jet2<T>& u, const Jet2<T>& phi) {
    using std::sqrt;
    const T norm2 = phi.grad[0] * phi.grad[0] + phi.grad[1] * phi.grad[1] + phi.grad[2] * phi.grad[2];
    const T norm = sqrt(norm2);
    const T inv = T(1.0) / norm;
    const std::array<T, 3> n = {phi.grad[0] * inv, phi.grad[1] * inv, phi.grad[2] * inv};

    T n_hphi_n = T(0.0);
    T n_hu_n = T(0.0);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const T ninj = n[i] * n[j];
            n_hphi_n = n_hphi_n + ninj * phi.h(i, j);
            n_hu_n = n_hu_n + ninj * u.h(i, j);
        }
    }
    const T div_n = (phi.laplacian() - n_hphi_n) * inv;
    const T du_n = u.grad[0] * n[0] + u.grad[1] * n[1] + u.grad[2] * n[2];
    return u.laplacian() - du_n * div_n - n_hu_n;
}

} // namespace biharm
