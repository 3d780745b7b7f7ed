#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace pointscat
{
//---------------------------------------------------------------------------//
//! Dense row-major square complex matrix.
class ComplexMatrix
{
  public:
    using value_type = std::complex<double>;

    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

    std::size_t size() const noexcept { return n_; }

    value_type& operator()(std::size_t i, std::size_t j)
    {
        return data_[i * n_ + j];
    }
    value_type const& operator()(std::size_t i, std::size_t j) const
    {
        return data_[i * n_ + j];
    }

    double max_abs() const
    {
        double m = 0;
        for (auto const& v : data_)
        {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

    //! Induced infinity norm (max row sum).
    double norm_inf() const
    {
        double m = 0;
        for (std::size_t i = 0; i < n_; ++i)
        {
            double row = 0;
            for (std::size_t j = 0; j < n_; ++j)
            {
                row += std::abs((*this)(i, j));
            }
            m = std::max(m, row);
        }
        return m;
    }

    std::vector<value_type> apply(std::span<value_type const> x) const
    {
        std::vector<value_type> y(n_);
        for (std::size_t i = 0; i < n_; ++i)
        {
            value_type acc = 0;
            for (std::size_t j = 0; j < n_; ++j)
            {
                acc += (*this)(i, j) * x[j];
            }
            y[i] = acc;
        }
        return y;
    }

  private:
    std::size_t n_{0};
    std::vector<value_type> data_;
};

//---------------------------------------------------------------------------//
/*!
 * LU factorization with partial (row) pivoting: P A = L U.
 *
 * Factoring never throws; callers decide what pivot magnitude counts as
 * singular via \c smallest_pivot().
 */
class LUFactorization
{
  public:
    using value_type = std::complex<double>;

    LUFactorization() = default;

    explicit LUFactorization(ComplexMatrix a)
        : lu_(std::move(a)), perm_(lu_.size())
    {
        std::size_t const n = lu_.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            perm_[i] = i;
        }
        smallest_pivot_ = n ? std::numeric_limits<double>::infinity() : 0;

        for (std::size_t col = 0; col < n; ++col)
        {
            std::size_t piv = col;
            double best = std::abs(lu_(col, col));
            for (std::size_t r = col + 1; r < n; ++r)
            {
                double v = std::abs(lu_(r, col));
                if (v > best)
                {
                    best = v;
                    piv = r;
                }
            }
            if (piv != col)
            {
                for (std::size_t j = 0; j < n; ++j)
                {
                    std::swap(lu_(piv, j), lu_(col, j));
                }
                std::swap(perm_[piv], perm_[col]);
                parity_ = -parity_;
            }
            smallest_pivot_ = std::min(smallest_pivot_, best);
            if (best == 0)
            {
                continue;
            }
            value_type const inv = value_type(1) / lu_(col, col);
            for (std::size_t r = col + 1; r < n; ++r)
            {
                value_type f = lu_(r, col) * inv;
                lu_(r, col) = f;
                if (f == value_type(0))
                {
                    continue;
                }
                for (std::size_t j = col + 1; j < n; ++j)
                {
                    lu_(r, j) -= f * lu_(col, j);
                }
            }
        }
    }

    std::size_t size() const noexcept { return lu_.size(); }
    double smallest_pivot() const noexcept { return smallest_pivot_; }

    value_type determinant() const
    {
        value_type det = static_cast<double>(parity_);
        for (std::size_t i = 0; i < lu_.size(); ++i)
        {
            det *= lu_(i, i);
        }
        return det;
    }

    std::vector<value_type> solve(std::span<value_type const> b) const
    {
        std::size_t const n = lu_.size();
        if (b.size() != n)
        {
            throw InvalidInput("right-hand side size mismatch");
        }
        std::vector<value_type> x(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            value_type acc = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j)
            {
                acc -= lu_(i, j) * x[j];
            }
            x[i] = acc;
        }
        for (std::size_t ii = n; ii-- > 0;)
        {
            value_type acc = x[ii];
            for (std::size_t j = ii + 1; j < n; ++j)
            {
                acc -= lu_(ii, j) * x[j];
            }
            x[ii] = acc / lu_(ii, ii);
        }
        return x;
    }

  private:
    ComplexMatrix lu_;
    std::vector<std::size_t> perm_;
    double smallest_pivot_{0};
    int parity_{1};
};

}  // namespace pointscat
