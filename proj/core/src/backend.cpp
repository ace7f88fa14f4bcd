#include "packsell/backend.hpp"

#include "packsell/errors.hpp"

namespace packsell {

std::string_view to_string(Precision p) noexcept {
  switch (p) {
    case Precision::real64: return "real64";
    case Precision::real32: return "real32";
    case Precision::real16: return "real16";
  }
  return "unknown";
}

Precision parse_precision(std::string_view name) {
  if (name == "real64" || name == "fp64") return Precision::real64;
  if (name == "real32" || name == "fp32") return Precision::real32;
  if (name == "real16" || name == "fp16") return Precision::real16;
  throw FormatError("unknown precision '" + std::string(name) + "'");
}

std::size_t CsrBackend::storage_bytes() const noexcept {
  return a_.nnz() * (sizeof(double) + sizeof(index_t)) + (a_.rows() + 1) * sizeof(offset_t);
}

std::string CsrBackend::name() const { return native_ == Precision::real64 ? "csr64" : "csr32"; }

std::unique_ptr<SpmvBackend> make_backend(std::string_view name, const CsrMatrix& a, const BackendOptions& options) {
  if (options.order == RowOrder::explicit_perm) {
    throw FormatError("backends need y in original order; use implicit or natural row order");
  }
  const SellOptions sell{options.slice_size, options.sigma, options.order};
  if (name == "csr64") return std::make_unique<CsrBackend>(a, Precision::real64);
  if (name == "csr32") return std::make_unique<CsrBackend>(a, Precision::real32);
  if (name == "sell64") return std::make_unique<SellBackend<double>>(build_sell<double>(a, sell));
  if (name == "sell32") return std::make_unique<SellBackend<float>>(build_sell<float>(a, sell));
  if (name == "sell16") {
    // Same overflow rule as the FP16 codec.
    for (double v : a.values()) encode_value(PackFormat::fp16(), v);
    return std::make_unique<SellBackend<Half>>(build_sell<Half>(a, sell));
  }
  if (name.starts_with("packsell-")) {
    PackSellOptions opts;
    opts.slice_size = options.slice_size;
    opts.sigma = options.sigma;
    opts.order = options.order;
    opts.format = PackFormat::parse(name.substr(9));
    return std::make_unique<PackSellBackend>(build_packsell(a, opts));
  }
  throw FormatError("unknown backend '" + std::string(name) + "'");
}

CsrMatrix stored_values(std::string_view name, const CsrMatrix& a) {
  std::vector<double> vals(a.values().begin(), a.values().end());
  if (name == "csr64" || name == "sell64") return a;
  if (name == "csr32" || name == "sell32") {
    for (double& v : vals) v = static_cast<float>(v);
  } else if (name == "sell16") {
    for (double& v : vals) v = static_cast<double>(Half(v));
  } else if (name.starts_with("packsell-")) {
    return quantize(a, PackFormat::parse(name.substr(9)));
  } else {
    throw FormatError("unknown backend '" + std::string(name) + "'");
  }
  return a.with_values(std::move(vals));
}

}  // namespace packsell
