#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "curvlab/rng.hpp"
#include "curvlab/roots.hpp"

namespace curvlab {

using Vec3 = std::array<cplx, 3>;
using Mat3 = std::array<Vec3, 3>;  //!< row-major

cplx dot(Vec3 const& a, Vec3 const& b) noexcept;  //!< <a,b> = sum conj(a) b
double norm(Vec3 const& a) noexcept;

//---------------------------------------------------------------------------//
/*!
 * Degree-d homogeneous polynomial in (X0, X1, X2).
 *
 * Terms hold the stored coefficient c_ijk of X0^i X1^j X2^k; for Kostlan
 * samples this already includes the monomial weight sqrt(d!/(i!j!k!)).
 */
class HomPoly3
{
  public:
    struct Term
    {
        int i, j, k;
        cplx c;
    };

    //! Validates exponents (sum d, no duplicates) and finiteness; throws
    //! MalformedInput.
    HomPoly3(int degree, std::vector<Term> terms);

    int degree() const noexcept { return degree_; }
    std::vector<Term> const& terms() const noexcept { return terms_; }

    //! Bombieri norm sqrt(sum |c|^2 i!j!k!/d!); |P(x)| <= norm for |x| = 1.
    double coeff_norm() const noexcept { return norm_; }

  private:
    int degree_;
    std::vector<Term> terms_;
    double norm_;
};

//! Value, gradient and Hessian of a homogeneous polynomial at a point.
struct PolyDerivs
{
    cplx value;
    Vec3 grad;
    Mat3 hess;
};

//! Unit vector in C^3 standing for a point of the projective plane.
struct ProjPoint
{
    Vec3 rep;
};

//! Projective line spanned by an orthonormal pair; parametrized u + s v.
struct ProjLine
{
    Vec3 u, v;
};

/*!
 * 2-jet at the chart origin of f(z, w) = P(u0 + z u1 + w u2).
 */
struct Jet2
{
    cplx f0, fz, fw, fzz, fww, fzw;
};

using Frame = std::array<Vec3, 3>;

//---------------------------------------------------------------------------//
// Operations
//---------------------------------------------------------------------------//

//! sqrt(d!/(i!j!k!)), via log-factorials for large d.
double kostlan_weight(int d, int i, int j, int k);

//! Kostlan sample: c_ijk = a_ijk sqrt(d!/(i!j!k!)), a_ijk canonical CN(0,1).
HomPoly3 sample_kostlan(int degree, RngStream const& stream);

cplx evaluate(HomPoly3 const& p, Vec3 const& x) noexcept;
PolyDerivs derivatives(HomPoly3 const& p, Vec3 const& x) noexcept;

//! Unitary frame (x, u1, u2) by Gram-Schmidt on the standard basis vectors
//! ordered by decreasing residual norm (ties by index).
Frame unitary_frame(ProjPoint const& x);

//! Exact 2-jet by monomial differentiation.
Jet2 directional_jet(HomPoly3 const& p, Frame const& frame) noexcept;

//! Relative tolerance for DegenerateLine screening.
inline constexpr double kDegenerateLineTol = 1e-10;

/*!
 * Coefficients of g(s) = P(L.u + s L.v) by evaluation at the (d+1)-th roots
 * of unity and an inverse DFT. Throws DegenerateLine when the leading
 * coefficient P(L.v) is below kDegenerateLineTol * coeff_norm().
 */
UniPoly restrict_to_line(HomPoly3 const& p, ProjLine const& line);

//! P o U, i.e. X -> P(U X), expanded exactly.
HomPoly3 compose_unitary(HomPoly3 const& p, Mat3 const& u);

//! Gram-Schmidt on (a, b); throws std::domain_error if dependent.
ProjLine make_line(Vec3 const& a, Vec3 const& b);

ProjPoint normalize(Vec3 const& x);

//---------------------------------------------------------------------------//
// JSON I/O
//---------------------------------------------------------------------------//

std::string poly_to_json(HomPoly3 const& p);
//! Throws MalformedInput.
HomPoly3 poly_from_json(std::string const& text);

void write_poly(HomPoly3 const& p, std::filesystem::path const& path);
HomPoly3 read_poly(std::filesystem::path const& path);

}  // namespace curvlab
