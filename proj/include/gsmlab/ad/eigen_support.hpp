#pragma once

// Lets the forward AD types live inside fixed-size Eigen matrices.

#include <Eigen/Core>
#include <limits>

#include "gsmlab/ad/dual.hpp"

namespace Eigen {

template <std::floating_point T, int N>
struct NumTraits<gsmlab::ad::Dual<T, N>> : NumTraits<T> {
  using Real = gsmlab::ad::Dual<T, N>;
  using NonInteger = gsmlab::ad::Dual<T, N>;
  using Nested = gsmlab::ad::Dual<T, N>;
  using Literal = T;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = N + 1,
    AddCost = N + 1,
    MulCost = 3 * N + 1
  };
};

template <std::floating_point T, int N, int M>
struct NumTraits<gsmlab::ad::Dual2<T, N, M>> : NumTraits<T> {
  using Real = gsmlab::ad::Dual2<T, N, M>;
  using NonInteger = gsmlab::ad::Dual2<T, N, M>;
  using Nested = gsmlab::ad::Dual2<T, N, M>;
  using Literal = T;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1 + N + M + N * M,
    AddCost = 1 + N + M + N * M,
    MulCost = 4 * (1 + N + M + N * M)
  };
};

template <std::floating_point T, int N, typename BinOp>
struct ScalarBinaryOpTraits<gsmlab::ad::Dual<T, N>, T, BinOp> {
  using ReturnType = gsmlab::ad::Dual<T, N>;
};
template <std::floating_point T, int N, typename BinOp>
struct ScalarBinaryOpTraits<T, gsmlab::ad::Dual<T, N>, BinOp> {
  using ReturnType = gsmlab::ad::Dual<T, N>;
};
template <std::floating_point T, int N, int M, typename BinOp>
struct ScalarBinaryOpTraits<gsmlab::ad::Dual2<T, N, M>, T, BinOp> {
  using ReturnType = gsmlab::ad::Dual2<T, N, M>;
};
template <std::floating_point T, int N, int M, typename BinOp>
struct ScalarBinaryOpTraits<T, gsmlab::ad::Dual2<T, N, M>, BinOp> {
  using ReturnType = gsmlab::ad::Dual2<T, N, M>;
};

}  // namespace Eigen
