#include "biharm/geometry.hpp"

#include "biharm/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace biharm {

AmbientScalarField::AmbientScalarField(std::string name, PlainFn plain, JetFn jet, NestedFn nested)
    : name_(std::move(name)), plain_(std::move(plain)), jet_(std::move(jet)),
      nested_(std::move(nested)) {}

NestedJet AmbientScalarField::eval(const NestedJet& x, const NestedJet& y,
                                   const NestedJet& z) const {
    if (!nested_) throw JetDepthExceeded("field '" + name_ + "' has no nested-jet evaluator");
    return nested_(x, y, z);
}

Jet AmbientScalarField::jet(const Vec3& p) const {
    const auto s = jet_seed(p);
    return jet_(s[0], s[1], s[2]);
}

NestedJet AmbientScalarField::nested_jet(const Vec3& p) const {
    const auto s = nested_seed(p);
    return eval(s[0], s[1], s[2]);
}

std::array<Jet, 3> jet_seed(const Vec3& p) {
    return {Jet::variable(p.x(), 0), Jet::variable(p.y(), 1), Jet::variable(p.z(), 2)};
}

std::array<NestedJet, 3> nested_seed(const Vec3& p) {
    std::array<NestedJet, 3> s;
    for (int i = 0; i < 3; ++i) {
        s[i] = NestedJet(Jet::variable(p[i], i));
        s[i].grad[i] = Jet(1.0);
    }
    return s;
}

bool BoundingBox::contains(const Vec3& p, double margin) const {
    for (int i = 0; i < 3; ++i) {
        if (p[i] < lo[i] - margin || p[i] > hi[i] + margin) return false;
    }
    return true;
}

LevelSetSurface::LevelSetSurface(std::string name, AmbientScalarField phi, BoundingBox bbox,
                                 Projector closed_form)
    : name_(std::move(name)), phi_(std::move(phi)), bbox_(bbox),
      closed_form_(std::move(closed_form)) {}

// ------------------------------------------------------------ built-ins

LevelSetSurface make_sphere(double radius) {
    const double r2 = radius * radius;
    auto phi = AmbientScalarField::from(
        "sphere", [r2](auto x, auto y, auto z) { return x * x + y * y + z * z - r2; });
    auto projector = [radius](const Vec3& x) -> Vec3 {
        const double n = x.norm();
        if (n <= kDegenerateGradient) throw DegenerateGradient("sphere projection of the centre");
        return radius * x / n;
    };
    return {"sphere", phi, {Vec3::Constant(-radius), Vec3::Constant(radius)}, projector};
}

LevelSetSurface make_torus(double major_radius, double minor_radius) {
    const double R0 = major_radius;
    const double R1 = minor_radius;
    auto phi = AmbientScalarField::from("torus", [R0, R1](auto x, auto y, auto z) {
        using std::sqrt;
        auto ring = R0 - sqrt(x * x + y * y);
        return sqrt(ring * ring + z * z) - R1;
    });
    auto projector = [R0, R1](const Vec3& x) -> Vec3 {
        const double rho = std::hypot(x.x(), x.y());
        if (rho <= kDegenerateGradient) throw DegenerateGradient("torus projection on the axis");
        const Vec3 centre(R0 * x.x() / rho, R0 * x.y() / rho, 0.0);
        const Vec3 d = x - centre;
        const double dn = d.norm();
        if (dn <= kDegenerateGradient) throw DegenerateGradient("torus projection on the core circle");
        return centre + R1 * d / dn;
    };
    const double outer = R0 + R1;
    return {"torus", phi, {Vec3(-outer, -outer, -R1), Vec3(outer, outer, R1)}, projector};
}

LevelSetSurface make_heart() {
    auto phi = AmbientScalarField::from("heart", [](auto x, auto y, auto z) {
        auto a = x - z * z;
        return a * a + y * y + z * z - 1.0;
    });
    // x = z^2 +- sqrt(1 - y^2 - z^2) spans [-1, 5/4].
    LevelSetSurface heart("heart", phi, {Vec3(-1.0, -1.0, -1.0), Vec3(1.25, 1.0, 1.0)});
    // The surface is the unit sphere sheared by x -> x + z^2.
    heart.with_sphere_map([](const Vec3& p) { return Vec3(p.x() + p.z() * p.z(), p.y(), p.z()); });
    return heart;
}

namespace {

struct Registry {
    std::mutex mutex;
    std::map<std::string, LevelSetSurface, std::less<>> surfaces;
    std::map<std::string, AmbientScalarField, std::less<>> solutions;

    Registry() {
        for (auto s : {make_sphere(), make_torus(), make_heart()}) surfaces.emplace(s.name(), s);
        auto add = [this](AmbientScalarField f) { solutions.emplace(f.name(), std::move(f)); };
        add(AmbientScalarField::from("xy", [](auto x, auto y, auto) { return x * y; }));
        add(AmbientScalarField::from("y_over_r", [](auto x, auto y, auto) {
            using std::sqrt;
            return y / sqrt(x * x + y * y);
        }));
        add(AmbientScalarField::from("y", [](auto, auto y, auto) { return y; }));
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

} // namespace

LevelSetSurface surface_by_name(std::string_view name) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.surfaces.find(name);
    if (it == r.surfaces.end()) throw PreconditionError("unknown surface '" + std::string(name) + "'");
    return it->second;
}

void register_surface(LevelSetSurface surface) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    r.surfaces.insert_or_assign(surface.name(), std::move(surface));
}

std::vector<std::string> surface_names() {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> names;
    for (const auto& [name, s] : r.surfaces) names.push_back(name);
    return names;
}

AmbientScalarField solution_by_name(std::string_view name) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.solutions.find(name);
    if (it == r.solutions.end()) throw PreconditionError("unknown solution '" + std::string(name) + "'");
    return it->second;
}

void register_solution(AmbientScalarField field) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    r.solutions.insert_or_assign(field.name(), std::move(field));
}

// ------------------------------------------------------------ calculus

namespace {

Vec3 gradient_of(const Jet& j) { return {j.grad[0], j.grad[1], j.grad[2]}; }

Vec3 unit_normal(const Jet& phi) {
    const Vec3 g = gradient_of(phi);
    const double n = g.norm();
    if (n <= kDegenerateGradient) throw DegenerateGradient("|grad phi| vanishes");
    return g / n;
}

void require_on_surface(const LevelSetSurface& surface, const Vec3& x) {
    const double v = surface.phi()(x);
    if (!(std::abs(v) < kOnSurfaceTolerance)) {
        throw PreconditionError("point is not on surface '" + surface.name() +
                                "' (|phi| = " + std::to_string(std::abs(v)) + ")");
    }
}

} // namespace

Vec3 normal(const LevelSetSurface& surface, const Vec3& x) {
    return unit_normal(surface.phi().jet(x));
}

Vec3 project(const LevelSetSurface& surface, const Vec3& x, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("projection tolerance must be positive");
    if (!surface.bbox().contains(x, 0.5 * surface.bbox().diagonal())) {
        throw PreconditionError("point is far outside the neighbourhood of '" + surface.name() + "'");
    }
    if (surface.has_closed_form_projection()) return surface.closed_form_projection()(x);

    const auto& phi = surface.phi();
    Vec3 y = x;
    double residual = std::abs(phi(y));
    for (int iter = 0; iter < kProjectionMaxIterations; ++iter) {
        if (residual < tol) return y;
        const Jet j = phi.jet(y);
        const Vec3 g = gradient_of(j);
        const double g2 = g.squaredNorm();
        if (g2 <= kDegenerateGradient * kDegenerateGradient) {
            throw DegenerateGradient("|grad phi| vanishes during projection");
        }
        const Vec3 step = (j.value / g2) * g;
        double factor = 1.0;
        Vec3 trial = y - step;
        double trial_residual = std::abs(phi(trial));
        while (trial_residual > residual && factor > 1e-8) {
            factor *= 0.5;
            trial = y - factor * step;
            trial_residual = std::abs(phi(trial));
        }
        y = trial;
        residual = trial_residual;
    }
    if (residual < tol) return y;
    throw NoConvergence("normal-flow projection onto '" + surface.name() + "' did not converge (|phi| = " +
                        std::to_string(residual) + ")");
}

Vec3 surface_gradient_exact(const LevelSetSurface& surface, const AmbientScalarField& u,
                            const Vec3& x) {
    require_on_surface(surface, x);
    const Vec3 n = normal(surface, x);
    const Vec3 g = gradient_of(u.jet(x));
    return g - g.dot(n) * n;
}

double laplace_beltrami_exact(const LevelSetSurface& surface, const AmbientScalarField& u,
                              const Vec3& x) {
    require_on_surface(surface, x);
    const Jet phi = surface.phi().jet(x);
    unit_normal(phi);
    return laplace_beltrami_formula<double>(u.jet(x), phi);
}

double manufactured_source(const LevelSetSurface& surface, const AmbientScalarField& u,
                           const Vec3& x) {
    require_on_surface(surface, x);
    if (!u.has_nested()) throw JetDepthExceeded("field '" + u.name() + "' has no nested-jet evaluator");
    if (!surface.phi().has_nested()) {
        throw JetDepthExceeded("level set of '" + surface.name() + "' has no nested-jet evaluator");
    }
    const Jet phi = surface.phi().jet(x);
    unit_normal(phi);
    // Jet of g(y) = Laplace-Beltrami expression of (u, phi) at y; g restricted
    // to the surface is Delta_S u, so it serves as its ambient extension.
    const Jet lap = laplace_beltrami_formula<Jet>(u.nested_jet(x), surface.phi().nested_jet(x));
    return laplace_beltrami_formula<double>(lap, phi);
}

} // namespace biharm
