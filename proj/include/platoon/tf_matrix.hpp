#ifndef PLATOON_TF_MATRIX_HPP
#define PLATOON_TF_MATRIX_HPP

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "platoon/rational.hpp"

namespace platoon {

enum class Structure { full, lower_triangular, lower_bidiagonal, diagonal };

const char* structure_name(Structure s);

// Dense matrix of rational functions with a verified structure tag: a tag
// other than `full` asserts that every position outside the pattern holds the
// exact zero function. Tags are inferred automatically after every operation.
class TfMatrix {
  public:
    TfMatrix() : rows_(0), cols_(0) {}
    TfMatrix(int rows, int cols);

    static TfMatrix identity(int n);
    static TfMatrix diagonal(const std::vector<RationalFn>& entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const RationalFn& at(int i, int j) const;
    void set(int i, int j, RationalFn v); // re-infers the structure tag

    Structure structure() const { return tag_; }
    // True when every position outside `s`'s pattern is the exact zero fn.
    bool matches(Structure s) const;

    TfMatrix operator*(const TfMatrix& o) const;
    TfMatrix operator+(const TfMatrix& o) const;
    TfMatrix operator-(const TfMatrix& o) const;
    TfMatrix operator-() const;
    TfMatrix scaled(const RationalFn& f) const; // entrywise f * this

    bool all_stable(double margin = kStabilityMargin) const;
    bool all_proper() const;
    bool all_strictly_proper() const;

    Eigen::MatrixXcd operator()(std::complex<double> s) const;
    Eigen::MatrixXcd at_omega(double w) const;

    // Block concatenation.
    static TfMatrix hstack(const TfMatrix& left, const TfMatrix& right);
    static TfMatrix vstack(const TfMatrix& top, const TfMatrix& bottom);

  private:
    int rows_, cols_;
    std::vector<RationalFn> e_;
    Structure tag_ = Structure::full;
    void infer_structure();
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * cols_ + j; }
};

} // namespace platoon

#endif
