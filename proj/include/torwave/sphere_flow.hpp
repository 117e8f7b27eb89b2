#pragma once

// Dynamics of the vector field zeta . d/dz on the sphere |z|^2 + |zeta|^2 = 1
// in R^{d-1} x R^{d-1}.  The flow has the closed form
//
//     phi^s(z0, zeta0) = (z0 + s zeta0, zeta0) / |(z0 + s zeta0, zeta0)|,
//
// whose fixed points are exactly {zeta = 0} and which otherwise converges to
// (zeta0/|zeta0|, 0) as s -> +infinity.  After rotating zeta0 onto the first
// axis and the residual part of z0 onto the second, the motion reduces to a
// single polar angle obeying  theta1' = -cos(theta2) sin^2(theta1); the angle
// integrator exists to validate that reduction against the closed form, which
// stays the canonical implementation.

#include <torwave/dense.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace torwave {

struct SpherePoint {
    DVec z, zeta;
};

inline double sphere_norm_defect(const SpherePoint& p) {
    double s = 0;
    for (double c : p.z) s += c * c;
    for (double c : p.zeta) s += c * c;
    return std::abs(s - 1.0);
}

inline SpherePoint normalized(SpherePoint p) {
    double s = 0;
    for (double c : p.z) s += c * c;
    for (double c : p.zeta) s += c * c;
    if (s <= 0) throw std::invalid_argument("sphere point must be nonzero");
    double inv = 1.0 / std::sqrt(s);
    for (double& c : p.z) c *= inv;
    for (double& c : p.zeta) c *= inv;
    return p;
}

inline SpherePoint sphere_point(DVec z, DVec zeta) {
    if (z.size() != zeta.size() || z.empty())
        throw std::invalid_argument("z and zeta must have equal nonzero dimension");
    return normalized(SpherePoint{std::move(z), std::move(zeta)});
}

inline SpherePoint flow_closed_form(const SpherePoint& p0, double s) {
    SpherePoint p = p0;
    for (std::size_t j = 0; j < p.z.size(); ++j) p.z[j] += s * p.zeta[j];
    return normalized(std::move(p));
}

// Polar angles of a canonical point: z = (cos t1, sin t1 sin t2 cos t3, 0...),
// zeta = (sin t1 cos t2, 0...).  theta3 is 0 or pi; it absorbs the sign of the
// second z coordinate, which cannot be rotated away when d = 3.  theta2 and
// theta3 are constant along trajectories; only theta1 moves.
struct AngleState {
    double theta1 = 0, theta2 = 0, theta3 = 0;
};

struct CanonicalFrame {
    DMat R_zeta, R_z;  // rotations of R^{d-1}; the frame map is R_z^T R_zeta^T
    SpherePoint canonical;
    AngleState angles;
};

namespace detail {

// Rotation carrying the unit vector u to the unit vector v, acting only in
// their common plane.  When v = -u the plane is degenerate and the rotation
// turns by pi inside span(u, e_pivot) for the first coordinate axis not
// parallel to u.
inline DMat rotation_carrying(const DVec& u, const DVec& v) {
    int m = static_cast<int>(u.size());
    double c = 0;
    for (int i = 0; i < m; ++i) c += u[i] * v[i];
    DVec w(m);
    double wn = 0;
    for (int i = 0; i < m; ++i) {
        w[i] = v[i] - c * u[i];
        wn += w[i] * w[i];
    }
    wn = std::sqrt(wn);
    double s;  // sine of the turning angle; c is its cosine
    if (wn <= 1e-14) {
        if (c > 0) return dmat_identity(m);
        // v = -u: turn by pi inside span(u, e) for the axis e least parallel to u
        int pivot = 0;
        for (int i = 1; i < m; ++i)
            if (std::abs(u[i]) < std::abs(u[pivot])) pivot = i;
        DVec e(m, 0.0);
        e[pivot] = 1.0;
        double ue = u[pivot];
        wn = 0;
        for (int i = 0; i < m; ++i) {
            w[i] = e[i] - ue * u[i];
            wn += w[i] * w[i];
        }
        wn = std::sqrt(wn);
        c = -1.0;
        s = 0.0;
    } else {
        s = std::min(wn, 1.0);
        c = std::clamp(c, -1.0, 1.0);
    }
    for (double& x : w) x /= wn;
    DMat r = dmat_identity(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            r[i][j] += (c - 1.0) * (u[i] * u[j] + w[i] * w[j]) + s * (w[i] * u[j] - u[i] * w[j]);
    return r;
}

inline DVec frame_apply(const CanonicalFrame& f, const DVec& v) {
    return dmat_apply(dmat_transpose(f.R_z), dmat_apply(dmat_transpose(f.R_zeta), v));
}

inline DVec frame_unapply(const CanonicalFrame& f, const DVec& v) {
    return dmat_apply(f.R_zeta, dmat_apply(f.R_z, v));
}

}  // namespace detail

inline SpherePoint apply_frame(const CanonicalFrame& f, const SpherePoint& p) {
    return SpherePoint{detail::frame_apply(f, p.z), detail::frame_apply(f, p.zeta)};
}

inline SpherePoint unapply_frame(const CanonicalFrame& f, const SpherePoint& p) {
    return SpherePoint{detail::frame_unapply(f, p.z), detail::frame_unapply(f, p.zeta)};
}

// Rotations aligning zeta with the first coordinate axis and the leftover
// part of z with the second, so that the whole trajectory lives in the three
// coordinates (z_1, z_2, zeta_1).  Both rotations commute with the flow.  A
// vanishing zeta returns identity rotations.
inline CanonicalFrame rotate_to_canonical(const SpherePoint& p0) {
    int m = static_cast<int>(p0.z.size());
    if (m < 2) throw std::invalid_argument("rotate_to_canonical: needs at least two z coordinates");
    CanonicalFrame f;
    double zn = 0;
    for (double c : p0.zeta) zn += c * c;
    zn = std::sqrt(zn);
    if (zn <= 1e-12) {
        f.R_zeta = dmat_identity(m);
        f.R_z = dmat_identity(m);
        f.canonical = p0;
        f.angles.theta1 = std::acos(std::clamp(p0.z[0], -1.0, 1.0));
        return f;
    }
    DVec e1(m, 0.0);
    e1[0] = 1.0;
    DVec zhat(m);
    for (int i = 0; i < m; ++i) zhat[i] = p0.zeta[i] / zn;
    f.R_zeta = detail::rotation_carrying(e1, zhat);

    DVec zp = dmat_apply(dmat_transpose(f.R_zeta), p0.z);
    double tail = 0;
    for (int i = 1; i < m; ++i) tail += zp[i] * zp[i];
    tail = std::sqrt(tail);
    if (tail <= 1e-14 || m == 2) {
        // m = 2: no rotation fixing the zeta axis can flip z_2; the sign goes
        // into theta3 instead
        f.R_z = dmat_identity(m);
    } else {
        // build the rotation inside the z-tail subspace so the zeta axis stays fixed
        DVec e2(m - 1, 0.0), that(m - 1);
        e2[0] = 1.0;
        for (int i = 1; i < m; ++i) that[i - 1] = zp[i] / tail;
        DMat rr = detail::rotation_carrying(e2, that);
        f.R_z = dmat_identity(m);
        for (int i = 1; i < m; ++i)
            for (int j = 1; j < m; ++j) f.R_z[i][j] = rr[i - 1][j - 1];
    }

    f.canonical = apply_frame(f, p0);
    double z1 = f.canonical.z[0];
    double z2 = m >= 2 ? f.canonical.z[1] : 0.0;
    double c1 = f.canonical.zeta[0];
    f.angles.theta1 = std::acos(std::clamp(z1, -1.0, 1.0));
    f.angles.theta2 = std::atan2(std::abs(z2), c1);
    f.angles.theta3 = z2 < 0 ? 3.14159265358979323846 : 0.0;
    return f;
}

// Integrates the polar-angle equation theta1' = -cos(theta2) sin^2(theta1)
// with classical fourth-order Runge-Kutta steps of size at most dt, in the
// canonical frame of p0, then rotates back.  Exists as an independent path to
// the closed form; the two must agree.
inline SpherePoint flow_angle_ode(const SpherePoint& p0, double s, double dt = 1e-3) {
    if (dt <= 0) throw std::invalid_argument("flow_angle_ode: dt must be positive");
    double zn = 0;
    for (double c : p0.zeta) zn += c * c;
    if (std::sqrt(zn) <= 1e-12) return p0;  // fixed point

    CanonicalFrame f = rotate_to_canonical(p0);
    double t1 = f.angles.theta1;
    const double c2 = std::cos(f.angles.theta2);
    const double c3 = f.angles.theta3 == 0.0 ? 1.0 : -1.0;

    int n = std::max(1, static_cast<int>(std::ceil(std::abs(s) / dt)));
    double h = s / n;
    auto rhs = [c2](double t) {
        double st = std::sin(t);
        return -c2 * st * st;
    };
    for (int i = 0; i < n; ++i) {
        double k1 = rhs(t1);
        double k2 = rhs(t1 + 0.5 * h * k1);
        double k3 = rhs(t1 + 0.5 * h * k2);
        double k4 = rhs(t1 + h * k3);
        t1 += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t1 = std::clamp(t1, 0.0, 3.14159265358979323846);
    }

    int m = static_cast<int>(p0.z.size());
    SpherePoint can;
    can.z.assign(m, 0.0);
    can.zeta.assign(m, 0.0);
    can.z[0] = std::cos(t1);
    if (m >= 2) can.z[1] = std::sin(t1) * std::sin(f.angles.theta2) * c3;
    can.zeta[0] = std::sin(t1) * std::cos(f.angles.theta2);
    return normalized(unapply_frame(f, can));
}

// Exact flow of theta' = -sin^2(theta) on the circle: theta stays on its open
// branch (k pi, (k+1) pi) and satisfies cot(theta(s)) = cot(theta0) + s there;
// multiples of pi are fixed points.  The branch is tracked so the returned
// angle is continuous in s and converges to k pi as s -> +infinity.
inline double circle_flow_theta(double theta0, double s) {
    const double pi = 3.14159265358979323846;
    if (std::abs(std::sin(theta0)) <= 1e-12) return theta0;
    double k = std::floor(theta0 / pi);
    double cot0 = std::cos(theta0) / std::sin(theta0);
    return k * pi + (pi / 2.0 - std::atan(cot0 + s));
}

}  // namespace torwave
