#pragma once

// Dominant face of the joint-decoding region and the structure of its faces:
// the two-sided description, the faces F_{S,T} and their product
// decomposition, degeneracy, and the face dimension.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cran/sampling.hpp"
#include "cran/uplink.hpp"

namespace cran {

inline constexpr double kFaceTol = 1e-8;
inline constexpr double kZeroInfoTol = 1e-10;

/// (S, T) with S ∪ T and S^c ∪ T^c both nonempty.
struct FaceQuery {
  IndexSet users;
  IndexSet relays;
};

inline bool admissible(const UplinkModel& m, const FaceQuery& q) {
  const bool inside = q.users.subset_of(m.all_users()) && q.relays.subset_of(m.all_relays());
  const bool nonempty = !q.users.empty() || !q.relays.empty();
  const bool proper = !q.users.complement(m.users()).empty() || !q.relays.complement(m.relays()).empty();
  return inside && nonempty && proper;
}

inline void require_admissible(const UplinkModel& m, const FaceQuery& q) {
  if (!admissible(m, q)) {
    throw SpecError("face query S=" + q.users.str() + ", T=" + q.relays.str() +
                    " needs S∪T and S^c∪T^c nonempty and indices in range");
  }
}

/// Every admissible (S, T) for the model, in subset order.
inline std::vector<FaceQuery> admissible_queries(const UplinkModel& m) {
  std::vector<FaceQuery> out;
  for (auto s : subsets_of(m.all_users())) {
    for (auto t : subsets_of(m.all_relays())) {
      FaceQuery q{s, t};
      if (admissible(m, q)) out.push_back(q);
    }
  }
  return out;
}

inline double sum_gap(const UplinkModel& m, const RateFronthaulPoint& p) {
  return p.fronthaul_sum(m.all_relays()) - p.rate_sum(m.all_users()) - m.sum_bound();
}

inline bool on_dominant_face(const UplinkModel& m, const RateFronthaulPoint& p, double tol = kFaceTol) {
  return in_jd_region(m, p, tol) && std::abs(sum_gap(m, p)) <= tol;
}

/// Upper face bound I(Y_T; Yhat_T | X_S).
inline double face_upper_bound(const UplinkModel& m, IndexSet s, IndexSet t) {
  return m.mi(m.y(t), m.yhat(t), m.x(s));
}

/// Two-sided description: for all (S, T),
/// I(Y_T;Yhat_T|X) - I(X_S;Yhat_{T^c}|X_{S^c}) <= C(T) - R(S) <= I(Y_T;Yhat_T|X_S).
inline bool on_dominant_face_alt(const UplinkModel& m, const RateFronthaulPoint& p, double tol = kFaceTol) {
  check_point_shape(m, p);
  for (auto s : subsets_of(m.all_users())) {
    for (auto t : subsets_of(m.all_relays())) {
      const double v = p.fronthaul_sum(t) - p.rate_sum(s);
      if (v < m.jd_bound(s, t) - tol || v > face_upper_bound(m, s, t) + tol) return false;
    }
  }
  return true;
}

/// Also defined for the trivial queries (S,T) = (∅,∅) and ([K],[L]), where it reduces to on_dominant_face.
inline void require_in_range(const UplinkModel& m, const FaceQuery& q) {
  if (!q.users.subset_of(m.all_users()) || !q.relays.subset_of(m.all_relays())) {
    throw SpecError("face query S=" + q.users.str() + ", T=" + q.relays.str() + " has indices out of range");
  }
}

inline bool in_face_FST(const UplinkModel& m, const RateFronthaulPoint& p, const FaceQuery& q, double tol = kFaceTol) {
  require_in_range(m, q);
  return on_dominant_face(m, p, tol) &&
         std::abs(p.fronthaul_sum(q.relays) - p.rate_sum(q.users) - face_upper_bound(m, q.users, q.relays)) <= tol;
}

/// Two-sided inequality family on the coordinates (R_A, C_B), A ⊆ users, B ⊆ relays.
struct SubFace {
  IndexSet users;
  IndexSet relays;
  std::function<double(IndexSet, IndexSet)> lower;
  std::function<double(IndexSet, IndexSet)> upper;

  bool contains(const RateFronthaulPoint& p, double tol) const {
    for (auto a : subsets_of(users)) {
      for (auto b : subsets_of(relays)) {
        const double v = p.fronthaul_sum(b) - p.rate_sum(a);
        if (v < lower(a, b) - tol || v > upper(a, b) + tol) return false;
      }
    }
    return true;
  }

  /// The lower bounds as a ConstraintFamily in local (0-based) coordinates.
  ConstraintFamily local_family() const {
    const auto um = users.members();
    const auto rm = relays.members();
    auto lift = [](IndexSet local, const std::vector<std::size_t>& members) {
      IndexSet g;
      for (auto i : local.members()) g = g.with(members[i]);
      return g;
    };
    return {um.size(), rm.size(),
            [=, lo = lower](IndexSet a, IndexSet b) { return lo(lift(a, um), lift(b, rm)); }};
  }

  /// Vertices of this sub-face in local coordinates (R over `users`, C over `relays`).
  std::vector<RateFronthaulPoint> local_vertices() const { return greedy_vertices(local_family()); }
};

/// D_{S,T}: the dominant face of the sub-network with users S and relays T,
/// the remaining users acting as noise.
inline SubFace sub_face_DST(const UplinkModel& m, IndexSet s, IndexSet t) {
  return SubFace{
      s, t,
      [&m, s, t](IndexSet a, IndexSet b) {
        return m.mi(m.y(b), m.yhat(b), m.x(s) | m.yhat(t - b)) - m.mi(m.x(a), m.yhat(t - b), m.x(s - a));
      },
      [&m](IndexSet a, IndexSet b) { return m.mi(m.y(b), m.yhat(b), m.x(a)); }};
}

/// D_{S^c,T^c|S,T}: the dominant face of the complementary sub-network when
/// X_S and Yhat_T are available as side information.
inline SubFace sub_face_cond(const UplinkModel& m, IndexSet s, IndexSet t) {
  const IndexSet sc = s.complement(m.users());
  const IndexSet tc = t.complement(m.relays());
  return SubFace{
      sc, tc,
      [&m, s, t, sc, tc](IndexSet a, IndexSet b) {
        return m.mi(m.y(b), m.yhat(b), m.x(sc) | m.yhat(tc - b) | m.x(s) | m.yhat(t)) -
               m.mi(m.x(a), m.yhat(tc - b) | m.yhat(t), m.x(sc - a) | m.x(s));
      },
      [&m, s, t](IndexSet a, IndexSet b) {
        return m.mi(m.y(b), m.yhat(b), m.x(a) | m.x(s) | m.yhat(t)) - m.mi(m.x(a), m.yhat(t), m.x(s));
      }};
}

/// Membership of the (R_S, C_T) coordinates of `p` in D_{S,T}.
inline bool in_sub_face_DST(const UplinkModel& m, const RateFronthaulPoint& p, const FaceQuery& q, double tol = kFaceTol) {
  require_admissible(m, q);
  check_point_shape(m, p);
  return sub_face_DST(m, q.users, q.relays).contains(p, tol);
}

/// Membership of the (R_{S^c}, C_{T^c}) coordinates of `p` in D_{S^c,T^c|S,T}.
inline bool in_sub_face_cond(const UplinkModel& m, const RateFronthaulPoint& p, const FaceQuery& q, double tol = kFaceTol) {
  require_admissible(m, q);
  check_point_shape(m, p);
  return sub_face_cond(m, q.users, q.relays).contains(p, tol);
}

inline bool in_face_product(const UplinkModel& m, const RateFronthaulPoint& p, const FaceQuery& q, double tol = kFaceTol) {
  return in_sub_face_DST(m, p, q, tol) && in_sub_face_cond(m, p, q, tol);
}

/// Coordinates (R_S, C_T) from `inner`, all others from `outer`.
inline RateFronthaulPoint splice(const RateFronthaulPoint& inner, const RateFronthaulPoint& outer, const FaceQuery& q) {
  RateFronthaulPoint p = outer;
  for (auto k : q.users.members()) p.R[k] = inner.R[k];
  for (auto l : q.relays.members()) p.C[l] = inner.C[l];
  return p;
}

/// Corners of the dominant face: every enumerated corner that lies on it.
inline std::vector<RateFronthaulPoint> dominant_face_vertices(const UplinkModel& m, double tol = kFaceTol) {
  std::vector<RateFronthaulPoint> out;
  for (const auto& v : enumerate_corners(m).vertices) {
    if (on_dominant_face(m, v, tol)) out.push_back(v);
  }
  return out;
}

struct FaceDecompositionReport {
  std::size_t face_corners = 0;
  std::size_t forward_checked = 0;
  std::size_t forward_violations = 0;   // face points outside the product
  std::size_t converse_checked = 0;
  std::size_t converse_violations = 0;  // product points outside the face
  std::size_t perturbed_checked = 0;
  std::size_t perturbed_missed = 0;     // perturbed points the product test failed to flag
  bool pass() const {
    return face_corners > 0 && forward_violations == 0 && converse_violations == 0 && perturbed_missed == 0;
  }
};

/// Samples F_{S,T} and D_{S,T} x D_{S^c,T^c|S,T} against each other.
///
/// Forward: the corners of F_{S,T} and `samples` random convex combinations of
/// them must satisfy both sub-face inequality families. Converse: points built
/// from the (S,T)-coordinates of one product member and the remaining
/// coordinates of another must lie in F_{S,T}. Each converse point is also
/// pushed by +0.1 in one coordinate, which the product test has to reject.
inline FaceDecompositionReport check_face_decomposition(const UplinkModel& m, const FaceQuery& q, std::size_t samples,
                                                        std::uint64_t seed, double tol = kFaceTol) {
  require_admissible(m, q);
  FaceDecompositionReport r;
  std::vector<RateFronthaulPoint> face;
  for (const auto& v : dominant_face_vertices(m)) {
    if (in_face_FST(m, v, q, tol)) face.push_back(v);
  }
  r.face_corners = face.size();
  if (face.empty()) return r;

  sampling::Rng rng(seed);
  std::vector<RateFronthaulPoint> members = face;
  for (std::size_t i = 0; i < samples; ++i) members.push_back(sampling::random_combination(rng, face));
  for (const auto& p : members) {
    ++r.forward_checked;
    if (!in_face_product(m, p, q, tol)) ++r.forward_violations;
  }

  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  const std::size_t dims = m.users() + m.relays();
  for (std::size_t i = 0; i < samples; ++i) {
    const auto mixed = splice(members[pick(rng)], members[pick(rng)], q);
    ++r.converse_checked;
    if (!in_face_FST(m, mixed, q, tol)) ++r.converse_violations;

    auto bumped = mixed;
    const std::size_t c = i % dims;
    if (c < m.users()) {
      bumped.R[c] += 0.1;
    } else {
      bumped.C[c - m.users()] += 0.1;
    }
    ++r.perturbed_checked;
    if (in_face_product(m, bumped, q, tol)) ++r.perturbed_missed;
  }
  return r;
}

/// I(X_S; Yhat_{T^c} | X_{S^c}) and I(X_{S^c}; Yhat_T | X_S) both (numerically) zero.
/// Trivially true for (∅,∅) and ([K],[L]).
inline bool degeneracy_condition(const UplinkModel& m, const FaceQuery& q, double tol = kZeroInfoTol) {
  require_in_range(m, q);
  const IndexSet sc = q.users.complement(m.users());
  const IndexSet tc = q.relays.complement(m.relays());
  return m.mi(m.x(q.users), m.yhat(tc), m.x(sc)) <= tol && m.mi(m.x(sc), m.yhat(q.relays), m.x(q.users)) <= tol;
}

/// Vertices of D_{S,T} x D_{S^c,T^c} in full (R, C) coordinates.
inline std::vector<RateFronthaulPoint> product_vertices(const UplinkModel& m, const FaceQuery& q) {
  require_admissible(m, q);
  const IndexSet sc = q.users.complement(m.users());
  const IndexSet tc = q.relays.complement(m.relays());
  const SubFace inner = sub_face_DST(m, q.users, q.relays);
  const SubFace outer = sub_face_DST(m, sc, tc);
  const auto iv = inner.local_vertices();
  const auto ov = outer.local_vertices();
  std::vector<RateFronthaulPoint> out;
  for (const auto& a : iv) {
    for (const auto& b : ov) {
      RateFronthaulPoint p{std::vector<double>(m.users()), std::vector<double>(m.relays())};
      const auto su = q.users.members(), tr = q.relays.members(), scu = sc.members(), tcr = tc.members();
      for (std::size_t i = 0; i < su.size(); ++i) p.R[su[i]] = a.R[i];
      for (std::size_t i = 0; i < tr.size(); ++i) p.C[tr[i]] = a.C[i];
      for (std::size_t i = 0; i < scu.size(); ++i) p.R[scu[i]] = b.R[i];
      for (std::size_t i = 0; i < tcr.size(); ++i) p.C[tcr[i]] = b.C[i];
      out.push_back(std::move(p));
    }
  }
  return dedup(out, kDedupTol);
}

/// Whether D and D_{S,T} x D_{S^c,T^c} have the same vertex set.
inline bool face_factorizes(const UplinkModel& m, const FaceQuery& q, double tol = kDedupTol) {
  return same_point_set(dominant_face_vertices(m), product_vertices(m, q), tol);
}

/// Affine dimension of the dominant face, from its vertices.
inline std::size_t dominant_face_dimension(const UplinkModel& m, double pivot_tol = kPivotTol) {
  check_enumeration_size(m.users(), m.relays());
  return affine_rank(dominant_face_vertices(m), pivot_tol);
}

/// A point of the dominant face that dominates `p` (rates no smaller,
/// fronthaul loads no larger). `p` must be in the joint-decoding region.
inline RateFronthaulPoint dominate_onto_face(const UplinkModel& m, const RateFronthaulPoint& p) {
  if (!in_jd_region(m, p)) throw SpecError("dominate_onto_face: point is outside the joint-decoding region");
  const auto family = m.jd_constraints();
  RateFronthaulPoint out = p;
  const auto all = SolveOrder::canonical(m.users(), m.relays());
  for (const Element e : all) {
    double room = std::numeric_limits<double>::infinity();
    for (auto s : subsets_of(m.all_users())) {
      for (auto t : subsets_of(m.all_relays())) {
        const bool involved = e.side == Side::User ? s.contains(e.index) : t.contains(e.index);
        if (involved) room = std::min(room, family.slack(out, s, t));
      }
    }
    room = std::max(room, 0.0);
    if (e.side == Side::User) {
      out.R[e.index] += room;
    } else {
      out.C[e.index] -= room;
    }
  }
  return out;
}

}  // namespace cran
