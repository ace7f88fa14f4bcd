#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include "packsell/half.hpp"
#include "packsell/matrix.hpp"
#include "packsell/packsell.hpp"
#include "packsell/sell.hpp"

namespace packsell {

enum class Precision { real64, real32, real16 };

std::string_view to_string(Precision p) noexcept;
/// "real64"/"fp64", "real32"/"fp32", "real16"/"fp16".
Precision parse_precision(std::string_view name);

/// A matrix in some storage format that can be applied to vectors of any
/// working precision. y is always in the original row order.
class SpmvBackend {
 public:
  virtual ~SpmvBackend() = default;

  virtual std::size_t rows() const noexcept = 0;
  virtual std::size_t cols() const noexcept = 0;
  /// Nonzeros of the source matrix; padding and dummies excluded.
  virtual std::size_t nnz() const noexcept = 0;
  virtual std::size_t storage_bytes() const noexcept = 0;
  virtual std::string name() const = 0;
  /// Precision the format is normally paired with (x, y and accumulator).
  virtual Precision native_precision() const noexcept = 0;

  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual void apply(std::span<const float> x, std::span<float> y) const = 0;
  virtual void apply(std::span<const Half> x, std::span<Half> y) const = 0;
};

class CsrBackend final : public SpmvBackend {
 public:
  CsrBackend(CsrMatrix a, Precision native) : a_(std::move(a)), native_(native) {}

  std::size_t rows() const noexcept override { return a_.rows(); }
  std::size_t cols() const noexcept override { return a_.cols(); }
  std::size_t nnz() const noexcept override { return a_.nnz(); }
  std::size_t storage_bytes() const noexcept override;
  std::string name() const override;
  Precision native_precision() const noexcept override { return native_; }

  void apply(std::span<const double> x, std::span<double> y) const override { csr_spmv<double>(a_, x, y); }
  void apply(std::span<const float> x, std::span<float> y) const override { csr_spmv<float>(a_, x, y); }
  void apply(std::span<const Half> x, std::span<Half> y) const override { csr_spmv<Half>(a_, x, y); }

  const CsrMatrix& matrix() const noexcept { return a_; }

 private:
  CsrMatrix a_;
  Precision native_;
};

template <class Value>
class SellBackend final : public SpmvBackend {
 public:
  explicit SellBackend(SellMatrix<Value> m) : m_(std::move(m)) {}

  std::size_t rows() const noexcept override { return m_.rows(); }
  std::size_t cols() const noexcept override { return m_.cols(); }
  std::size_t nnz() const noexcept override { return m_.nnz(); }
  std::size_t storage_bytes() const noexcept override { return m_.storage_bytes(); }
  std::string name() const override {
    if constexpr (std::is_same_v<Value, double>) return "sell64";
    else if constexpr (std::is_same_v<Value, float>) return "sell32";
    else return "sell16";
  }
  Precision native_precision() const noexcept override {
    if constexpr (std::is_same_v<Value, double>) return Precision::real64;
    else if constexpr (std::is_same_v<Value, float>) return Precision::real32;
    else return Precision::real16;
  }

  void apply(std::span<const double> x, std::span<double> y) const override { sell_spmv<double, Value>(m_, x, y); }
  void apply(std::span<const float> x, std::span<float> y) const override { sell_spmv<float, Value>(m_, x, y); }
  void apply(std::span<const Half> x, std::span<Half> y) const override { sell_spmv<Half, Value>(m_, x, y); }

  const SellMatrix<Value>& matrix() const noexcept { return m_; }

 private:
  SellMatrix<Value> m_;
};

class PackSellBackend final : public SpmvBackend {
 public:
  explicit PackSellBackend(PackSellMatrix m) : m_(std::move(m)) {}

  std::size_t rows() const noexcept override { return m_.rows(); }
  std::size_t cols() const noexcept override { return m_.cols(); }
  std::size_t nnz() const noexcept override { return m_.counts().nnz_real; }
  std::size_t storage_bytes() const noexcept override { return m_.storage_bytes(); }
  std::string name() const override { return "packsell-" + m_.format().name(); }
  Precision native_precision() const noexcept override {
    return m_.format().codec == Codec::fp16 ? Precision::real16 : Precision::real32;
  }

  void apply(std::span<const double> x, std::span<double> y) const override { packsell_spmv<double>(m_, x, y); }
  void apply(std::span<const float> x, std::span<float> y) const override { packsell_spmv<float>(m_, x, y); }
  void apply(std::span<const Half> x, std::span<Half> y) const override { packsell_spmv<Half>(m_, x, y); }

  const PackSellMatrix& matrix() const noexcept { return m_; }

 private:
  PackSellMatrix m_;
};

struct BackendOptions {
  std::size_t slice_size = 32;
  std::size_t sigma = 256;
  /// explicit_perm is rejected: backends must return y in original order.
  RowOrder order = RowOrder::implicit_perm;
};

/// Builds a backend by name: csr64, csr32, sell64, sell32, sell16,
/// packsell-fp16, packsell-e8m<Y>, packsell-fp32.
std::unique_ptr<SpmvBackend> make_backend(std::string_view name, const CsrMatrix& a,
                                          const BackendOptions& options = {});

/// The source matrix as seen by a backend: values rounded to the stored
/// representation. SpMV through the backend equals CSR SpMV on this matrix.
CsrMatrix stored_values(std::string_view name, const CsrMatrix& a);

}  // namespace packsell
