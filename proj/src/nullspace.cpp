#include "moments/nullspace.hpp"

#include <Eigen/QR>

namespace moments {

Configuration<double> reduce_frame(const Configuration<double>& x, const Tolerance& tol) {
    const Index n = x.size();
    const Matrix<double> rel = x.points().colwise() - Vector<double>(x.point(0));
    const IndexSet cols = independent_columns<double>(rel, tol);
    const Index d = static_cast<Index>(cols.size());
    if (d == 0)
        return Configuration<double>(Matrix<double>::Zero(1, n));
    const Matrix<double> span = rel(Eigen::all, cols);
    Eigen::HouseholderQR<Matrix<double>> qr(span);
    Matrix<double> q = qr.householderQ() * Matrix<double>::Identity(x.ambient_dimension(), d);
    const Matrix<double> r = qr.matrixQR().topLeftCorner(d, d);
    for (Index k = 0; k < d; ++k)
        if (r(k, k) < 0.0)
            q.col(k) = -q.col(k);
    return Configuration<double>(Matrix<double>(q.transpose() * rel));
}

} // namespace moments
