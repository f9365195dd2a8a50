#include "nhspec/linalg.hpp"

#include <string>

namespace nhspec {

void require_valid(const CMat& m, const char* who) {
    if (m.rows() != m.cols()) {
        throw InvalidInput(std::string(who) + ": matrix must be square");
    }
    const auto d = m.rows();
    if (d != 2 && d != 3 && d != 6) {
        throw InvalidInput(std::string(who) + ": matrix dimension must be 2, 3 or 6");
    }
    if (!m.allFinite()) {
        throw InvalidInput(std::string(who) + ": non-finite matrix entry");
    }
}

namespace {

bool before(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) {
        return a.real() > b.real();
    }
    return a.imag() > b.imag();
}

std::pair<cplx, cplx> roots(cplx tr, cplx det) {
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    const cplx plus = tr + disc;
    const cplx minus = tr - disc;
    const cplx big = 0.5 * (std::abs(plus) >= std::abs(minus) ? plus : minus);
    const cplx other = big == cplx(0.0) ? cplx(0.0) : det / big;
    return before(other, big) ? std::pair{other, big} : std::pair{big, other};
}

}  // namespace

std::pair<cplx, cplx> eig2(const Eigen::Matrix2cd& h) {
    if (!h.allFinite()) {
        throw InvalidInput("eig2: non-finite matrix entry");
    }
    return roots(h.trace(), h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0));
}

std::pair<cplx, cplx> eig2(const CMat& h) {
    if (h.rows() != 2 || h.cols() != 2) {
        throw InvalidInput("eig2: matrix must be 2x2");
    }
    return eig2(Eigen::Matrix2cd(h));
}

CMat expm(const CMat& a, double t) {
    require_valid(a, "expm");
    return detail::expm_minus_i(a, t);
}

Eigen::Matrix3cd expm(const Eigen::Matrix3cd& a, double t) {
    if (!a.allFinite()) {
        throw InvalidInput("expm: non-finite matrix entry");
    }
    return detail::expm_minus_i(a, t);
}

CVec evolve(const CMat& h, const CVec& psi0, double t) {
    require_valid(h, "evolve");
    if (psi0.size() != h.rows()) {
        throw InvalidInput("evolve: state dimension does not match the Hamiltonian");
    }
    if (!psi0.allFinite()) {
        throw InvalidInput("evolve: non-finite state amplitude");
    }
    return detail::expm_minus_i(h, t) * psi0;
}

}  // namespace nhspec
