#include "mpep/euler_lagrange.hpp"

#include <stdexcept>

namespace mpep {

Mat matvec_jacobian_fd(const std::function<Mat(const Vec&)>& A, const Vec& u,
                       const Vec& c, bool transpose, double step) {
    const int n = static_cast<int>(u.size());
    Mat out(c.size(), n);
    Vec up = u, um = u;
    for (int k = 0; k < n; ++k) {
        const double h = step * std::max(1.0, std::abs(u(k)));
        up(k) = u(k) + h;
        um(k) = u(k) - h;
        const Mat Ap = A(up), Am = A(um);
        out.col(k) = transpose ? Vec((Ap.transpose() - Am.transpose()) * c / (2 * h))
                               : Vec((Ap - Am) * c / (2 * h));
        up(k) = u(k);
        um(k) = u(k);
    }
    return out;
}

Vec ElSystem::rhs(const Vec& z) const {
    const int n = model.n;
    if (z.size() != 2 * n) throw std::invalid_argument("ElSystem: state dimension mismatch");
    const Vec u = z.head(n);
    const Vec p = z.tail(n);
    Vec out(2 * n);
    if (form == ElForm::WForm) {
        out.head(n) = drift(model, u, mu) + p;
        out.tail(n) = -drift_jacobian(model, u, mu).transpose() * p;
    } else {
        out.head(n) = -drift(model, u, mu) + p;
        Vec vdot = model.f_jac(u).transpose() * p;
        if (mu != 0.0) {
            const Mat Dg = model.g_jac(u);
            vdot += mu * (2.0 * (Dg.transpose() - Dg) * (model.f(u) + mu * model.g(u)) +
                          (2.0 * Dg - Dg.transpose()) * p);
        }
        out.tail(n) = vdot;
    }
    return out;
}

Mat ElSystem::rhs_jac(const Vec& z) const {
    const int n = model.n;
    if (z.size() != 2 * n) throw std::invalid_argument("ElSystem: state dimension mismatch");
    const Vec u = z.head(n);
    const Vec p = z.tail(n);
    Mat J = Mat::Zero(2 * n, 2 * n);
    if (form == ElForm::WForm) {
        const Mat DF = drift_jacobian(model, u, mu);
        J.topLeftCorner(n, n) = DF;
        J.topRightCorner(n, n) = Mat::Identity(n, n);
        auto DFmap = [this](const Vec& x) { return drift_jacobian(model, x, mu); };
        J.bottomLeftCorner(n, n) = -matvec_jacobian_fd(DFmap, u, p, /*transpose=*/true);
        J.bottomRightCorner(n, n) = -DF.transpose();
    } else {
        J.topLeftCorner(n, n) = -drift_jacobian(model, u, mu);
        J.topRightCorner(n, n) = Mat::Identity(n, n);
        const Mat Df = model.f_jac(u);
        Mat dvdu = matvec_jacobian_fd(model.f_jac, u, p, /*transpose=*/true);
        Mat dvdp = Df.transpose();
        if (mu != 0.0) {
            const Mat Dg = model.g_jac(u);
            const Vec F = model.f(u) + mu * model.g(u);
            auto antisym = [this](const Vec& x) {
                const Mat G = model.g_jac(x);
                return Mat(G.transpose() - G);
            };
            auto mixed = [this](const Vec& x) {
                const Mat G = model.g_jac(x);
                return Mat(2.0 * G - G.transpose());
            };
            dvdu += mu * (2.0 * matvec_jacobian_fd(antisym, u, F, /*transpose=*/false) +
                          2.0 * (Dg.transpose() - Dg) * (Df + mu * Dg) +
                          matvec_jacobian_fd(mixed, u, p, /*transpose=*/false));
            dvdp += mu * (2.0 * Dg - Dg.transpose());
        }
        J.bottomLeftCorner(n, n) = dvdu;
        J.bottomRightCorner(n, n) = dvdp;
    }
    return J;
}

double ElSystem::invariant(const Vec& z) const {
    const int n = model.n;
    const Vec u = z.head(n);
    const Vec p = z.tail(n);
    return form == ElForm::WForm ? hamiltonian_w(model, mu, u, p)
                                 : conserved_c(model, mu, u, p);
}

Vec ElSystem::invariant_gradient(const Vec& z) const {
    const int n = model.n;
    const Vec u = z.head(n);
    const Vec p = z.tail(n);
    const Mat DF = drift_jacobian(model, u, mu);
    const Vec F = drift(model, u, mu);
    Vec grad(2 * n);
    if (form == ElForm::WForm) {
        grad.head(n) = DF.transpose() * p;
        grad.tail(n) = p + F;
    } else {
        grad.head(n) = -DF.transpose() * p;
        grad.tail(n) = p - F;
    }
    return grad;
}

ElSystem assemble_w_form(const VectorFieldModel& model, double mu) {
    return ElSystem{model, mu, ElForm::WForm};
}

ElSystem assemble_v_form(const VectorFieldModel& model, double mu) {
    return ElSystem{model, mu, ElForm::VForm};
}

double hamiltonian_w(const VectorFieldModel& model, double mu, const Vec& u, const Vec& w) {
    return 0.5 * w.squaredNorm() + drift(model, u, mu).dot(w);
}

double conserved_c(const VectorFieldModel& model, double mu, const Vec& u, const Vec& v) {
    return 0.5 * v.squaredNorm() - drift(model, u, mu).dot(v);
}

std::pair<Vec, Vec> to_v_coords(const VectorFieldModel& model, double mu, const Vec& u, const Vec& w) {
    return {u, Vec(w + 2.0 * drift(model, u, mu))};
}

std::pair<Vec, Vec> to_w_coords(const VectorFieldModel& model, double mu, const Vec& u, const Vec& v) {
    return {u, Vec(v - 2.0 * drift(model, u, mu))};
}

}  // namespace mpep
