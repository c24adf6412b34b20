#ifndef JETSYM_SYMBOLS_HPP
#define JETSYM_SYMBOLS_HPP

#include <compare>
#include <cstdint>
#include <string>

namespace jetsym {

// Symbol kinds, in canonical order. The order of the enum values is part of
// the canonical form of every polynomial and report, so new kinds must be
// appended, never inserted.
enum class SymKind : std::uint8_t {
  Jet = 0,     // x_i^(k), i-th system variable differentiated k times
  Ctrl = 1,    // u_j^(k), control of the explicit realization
  Fiber = 2,   // a_i, tangent-fiber coordinate over x_i
  FiberB = 3,  // b_{j,k}, tangent-fiber coordinate over u_j^(k)
  AVar = 4,    // A_i, unknowns of the repeated-differentiation ideal
  Zeta = 5,    // z_i^(k), flat-basis first integrals and their derivatives
  Coeff = 6,   // c_r, scalar unknowns of a polynomial ansatz
  Partial = 7, // opaque first partial of unknown a_i by x_j^(k)
};

// A symbol is a plain value: kind plus up to three small indices packed into
// one 64-bit key. Comparing keys compares (kind, i, j, k) lexicographically,
// which gives a total order independent of the order symbols were first used.
struct Sym {
  std::uint64_t key = 0;

  static constexpr Sym pack(SymKind kind, std::uint32_t i, std::uint32_t j,
                            std::uint32_t k) {
    Sym s;
    s.key = (static_cast<std::uint64_t>(kind) << 48) |
            (static_cast<std::uint64_t>(i & 0xffffu) << 32) |
            (static_cast<std::uint64_t>(j & 0xffffu) << 16) |
            static_cast<std::uint64_t>(k & 0xffffu);
    return s;
  }

  // var: 1-based index of the system variable, ord: number of time derivatives
  static constexpr Sym jet(int var, int ord) {
    return pack(SymKind::Jet, static_cast<std::uint32_t>(var), 0,
                static_cast<std::uint32_t>(ord));
  }
  static constexpr Sym ctrl(int j, int ord) {
    return pack(SymKind::Ctrl, static_cast<std::uint32_t>(j), 0,
                static_cast<std::uint32_t>(ord));
  }
  static constexpr Sym fiber(int var) {
    return pack(SymKind::Fiber, static_cast<std::uint32_t>(var), 0, 0);
  }
  static constexpr Sym fiber_b(int j, int ord) {
    return pack(SymKind::FiberB, static_cast<std::uint32_t>(j), 0,
                static_cast<std::uint32_t>(ord));
  }
  static constexpr Sym avar(int var) {
    return pack(SymKind::AVar, static_cast<std::uint32_t>(var), 0, 0);
  }
  static constexpr Sym zeta(int i, int ord) {
    return pack(SymKind::Zeta, static_cast<std::uint32_t>(i), 0,
                static_cast<std::uint32_t>(ord));
  }
  static constexpr Sym coeff(int r) {
    return pack(SymKind::Coeff, static_cast<std::uint32_t>(r), 0, 0);
  }
  // d a_i / d x_j^(k)
  static constexpr Sym partial(int i, int j, int ord) {
    return pack(SymKind::Partial, static_cast<std::uint32_t>(i),
                static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(ord));
  }

  constexpr SymKind kind() const {
    return static_cast<SymKind>((key >> 48) & 0xff);
  }
  constexpr int i() const { return static_cast<int>((key >> 32) & 0xffffu); }
  constexpr int j() const { return static_cast<int>((key >> 16) & 0xffffu); }
  constexpr int k() const { return static_cast<int>(key & 0xffffu); }

  auto operator<=>(const Sym&) const = default;
};

// Renders "x", "x'", "x''", then D(x,5) beyond four primes; used for both
// report output and the expression grammar (D(...) is re-parseable).
std::string jet_suffix_name(const std::string& base, int ord);

// Default symbol name with 1-based indices: x3', u1, a2, b1, A3, z1'', c4,
// d(a2)/d(x1'). A system supplies real variable names via its name table.
std::string default_sym_name(Sym s);

} // namespace jetsym

#endif
