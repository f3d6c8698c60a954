#include "platoon/tf_matrix.hpp"

#include "platoon/errors.hpp"

namespace platoon {

const char* structure_name(Structure s) {
    switch (s) {
        case Structure::full: return "full";
        case Structure::lower_triangular: return "lower_triangular";
        case Structure::lower_bidiagonal: return "lower_bidiagonal";
        case Structure::diagonal: return "diagonal";
    }
    return "?";
}

TfMatrix::TfMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw InvalidParameter("TfMatrix dimensions must be non-negative");
    e_.assign(static_cast<size_t>(rows) * cols, RationalFn::zero());
    infer_structure();
}

TfMatrix TfMatrix::identity(int n) {
    TfMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.e_[m.idx(i, i)] = RationalFn::one();
    m.infer_structure();
    return m;
}

TfMatrix TfMatrix::diagonal(const std::vector<RationalFn>& entries) {
    const int n = static_cast<int>(entries.size());
    TfMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.e_[m.idx(i, i)] = entries[static_cast<size_t>(i)];
    m.infer_structure();
    return m;
}

const RationalFn& TfMatrix::at(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw InvalidParameter("TfMatrix index out of range");
    return e_[idx(i, j)];
}

void TfMatrix::set(int i, int j, RationalFn v) {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw InvalidParameter("TfMatrix index out of range");
    e_[idx(i, j)] = std::move(v);
    infer_structure();
}

bool TfMatrix::matches(Structure s) const {
    if (s == Structure::full) return true;
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            bool allowed = false;
            switch (s) {
                case Structure::full: allowed = true; break;
                case Structure::lower_triangular: allowed = i >= j; break;
                case Structure::lower_bidiagonal: allowed = i == j || i == j + 1; break;
                case Structure::diagonal: allowed = i == j; break;
            }
            if (!allowed && !e_[idx(i, j)].is_zero()) return false;
        }
    }
    return true;
}

void TfMatrix::infer_structure() {
    if (matches(Structure::diagonal)) tag_ = Structure::diagonal;
    else if (matches(Structure::lower_bidiagonal)) tag_ = Structure::lower_bidiagonal;
    else if (matches(Structure::lower_triangular)) tag_ = Structure::lower_triangular;
    else tag_ = Structure::full;
}

TfMatrix TfMatrix::operator*(const TfMatrix& o) const {
    if (cols_ != o.rows_) throw InvalidParameter("TfMatrix product dimension mismatch");
    TfMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < o.cols_; ++j) {
            RationalFn acc = RationalFn::zero();
            for (int k = 0; k < cols_; ++k) {
                const RationalFn& a = e_[idx(i, k)];
                const RationalFn& b = o.e_[o.idx(k, j)];
                if (a.is_zero() || b.is_zero()) continue;
                acc += a * b;
            }
            r.e_[r.idx(i, j)] = std::move(acc);
        }
    }
    r.infer_structure();
    return r;
}

TfMatrix TfMatrix::operator+(const TfMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidParameter("TfMatrix sum dimension mismatch");
    TfMatrix r(rows_, cols_);
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] + o.e_[k];
    r.infer_structure();
    return r;
}

TfMatrix TfMatrix::operator-(const TfMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidParameter("TfMatrix difference dimension mismatch");
    TfMatrix r(rows_, cols_);
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] - o.e_[k];
    r.infer_structure();
    return r;
}

TfMatrix TfMatrix::operator-() const {
    TfMatrix r(rows_, cols_);
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = -e_[k];
    r.tag_ = tag_;
    return r;
}

TfMatrix TfMatrix::scaled(const RationalFn& f) const {
    TfMatrix r(rows_, cols_);
    for (size_t k = 0; k < e_.size(); ++k) {
        if (!e_[k].is_zero() && !f.is_zero()) r.e_[k] = f * e_[k];
    }
    r.infer_structure();
    return r;
}

bool TfMatrix::all_stable(double margin) const {
    for (const auto& f : e_)
        if (!f.is_stable(margin)) return false;
    return true;
}

bool TfMatrix::all_proper() const {
    for (const auto& f : e_)
        if (!f.is_proper()) return false;
    return true;
}

bool TfMatrix::all_strictly_proper() const {
    for (const auto& f : e_)
        if (!f.is_zero() && !f.is_strictly_proper()) return false;
    return true;
}

Eigen::MatrixXcd TfMatrix::operator()(std::complex<double> s) const {
    Eigen::MatrixXcd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(i, j) = e_[idx(i, j)](s);
    return m;
}

Eigen::MatrixXcd TfMatrix::at_omega(double w) const { return (*this)(std::complex<double>(0.0, w)); }

TfMatrix TfMatrix::hstack(const TfMatrix& left, const TfMatrix& right) {
    if (left.rows_ != right.rows_) throw InvalidParameter("hstack row mismatch");
    TfMatrix r(left.rows_, left.cols_ + right.cols_);
    for (int i = 0; i < left.rows_; ++i) {
        for (int j = 0; j < left.cols_; ++j) r.e_[r.idx(i, j)] = left.e_[left.idx(i, j)];
        for (int j = 0; j < right.cols_; ++j) r.e_[r.idx(i, left.cols_ + j)] = right.e_[right.idx(i, j)];
    }
    r.infer_structure();
    return r;
}

TfMatrix TfMatrix::vstack(const TfMatrix& top, const TfMatrix& bottom) {
    if (top.cols_ != bottom.cols_) throw InvalidParameter("vstack column mismatch");
    TfMatrix r(top.rows_ + bottom.rows_, top.cols_);
    for (int j = 0; j < top.cols_; ++j) {
        for (int i = 0; i < top.rows_; ++i) r.e_[r.idx(i, j)] = top.e_[top.idx(i, j)];
        for (int i = 0; i < bottom.rows_; ++i) r.e_[r.idx(top.rows_ + i, j)] = bottom.e_[bottom.idx(i, j)];
    }
    r.infer_structure();
    return r;
}

} // namespace platoon
