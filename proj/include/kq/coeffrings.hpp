#pragma once

#include "kq/exactalg.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kq {

struct MissingTableEntry : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WrongCoefficients : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotPrimePower : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Coeff { Z, Z2, Z3 };
enum class ConjectureMode { AssumeVanishing, TrackUnknown };
enum class CyclicityMode { AssumeCyclic, TrackUncertain };
enum class ProfileKind { IntegersZ, RealsR, FiniteField, CD2Field };

inline constexpr const char* kConditional = "conditional: Kummer-Vandiver-adjacent";
inline constexpr const char* kUnknown = "unknown: finite, order a product of irregular primes";
inline constexpr const char* kCyclicityUncertain = "uncertain: conjecturally cyclic of the stated order";

// s+(w) convention; topological degree t = s + w
struct Bidegree {
    int s = 0, w = 0;
    int t() const { return s + w; }
    bool operator==(const Bidegree&) const = default;
};
Bidegree grade_convert(int t, int w);
// GW^w_t = pi_{t-2w,-w} KQ
Bidegree gw_index(int t, int w);

struct CohClass {
    enum Kind { TauRho, TauEps, Gen };
    Kind kind = Gen;
    int a = 0, b = 0; // TauRho: tau^a rho^b in h^{b,a+b};  TauEps: tau^a * (tau eps) in h^{1,a+2}
    std::string label;
    Int order = 0; // 0 means infinite cyclic
    int s = 0, w = 0;

    static CohClass tau_rho(int a, int b);
    static CohClass tau_eps(int a);
    static CohClass gen(std::string label, const Int& order, int s, int w);
    std::string str() const;
    bool operator==(const CohClass& o) const { return kind == o.kind && a == o.a && b == o.b && label == o.label; }
};

struct GroupWithBasis {
    Group group;
    std::vector<CohClass> basis;
    std::set<std::string> flags;

    std::vector<Int> orders() const;
    bool is_zero() const { return basis.empty(); }
    std::optional<size_t> index_of(const CohClass& c) const;
    json to_json() const;
};

struct Profile {
    std::string name;
    ProfileKind kind = ProfileKind::IntegersZ;
    Int q = 0;              // finite fields
    Int characteristic = 0; // finite fields
    ConjectureMode conjecture = ConjectureMode::AssumeVanishing;
    CyclicityMode cyclicity = CyclicityMode::AssumeCyclic;
    // cd <= 2 tables
    std::map<std::pair<int, int>, Group> tH, th2, th3;
    std::map<int, Group> tkmw;

    bool is_field() const { return kind == ProfileKind::FiniteField || kind == ProfileKind::CD2Field; }
    // d in the row vanishing bound q <= s + d
    int dimension() const { return kind == ProfileKind::IntegersZ ? 1 : 0; }
};

Profile profile_integers(ConjectureMode cm = ConjectureMode::AssumeVanishing,
                         CyclicityMode cy = CyclicityMode::AssumeCyclic);
Profile profile_reals();
Profile profile_finite_field(const Int& q);
Profile profile_cd2_from_json(const json& j);
Profile load_cd2_profile(const std::string& path);
// resolves "Z", "R", "F<q>" or a JSON path
Profile profile_by_name(const std::string& name);

GroupWithBasis coeff(const Profile& p, Coeff c, int s, int w);
Group kmw(const Profile& p, int b);

// one layer of a filtered group; lower index = lower filtration (quotient side)
struct Layer {
    Group group;
    std::string label;
    std::set<std::string> flags;
};
// K^MW_b as layers, quotient first
std::vector<Layer> kmw_layers(const Profile& p, int b);

std::optional<CohClass> steenrod(const Profile& p, int op, const CohClass& c);

// matrices on the named bases; rows index the target basis
IntMatrix pr_matrix(const Profile& p, int s, int w);         // H^{s,w} -> h^{s,w}, mod 2
IntMatrix sq2_matrix(const Profile& p, int s, int w);        // h^{s,w} -> h^{s+2,w+1}
IntMatrix sq1_matrix(const Profile& p, int s, int w);        // h^{s,w} -> h^{s+1,w}
IntMatrix bockstein_matrix(const Profile& p, int s, int w);  // h^{s,w} -> H^{s+1,w}
IntMatrix sq2pr_matrix(const Profile& p, int s, int w);      // H^{s,w} -> h^{s+2,w+1}, mod 2

struct Hom {
    GroupWithBasis src, tgt;
    IntMatrix m;
    bool is_zero() const;
    Group kernel() const;
    Group image() const;
    Group cokernel() const;
};
// d Sq2 pr : H^{s,w} -> H^{s+3,w+1}
Hom theta(const Profile& p, int s, int w);

// rational data for the rational comparison
int rational_rank(const Profile& p, int s, int w);
int witt_rational_rank(const Profile& p);

// F_2-linear label map h(Z) -> h(R)
std::optional<CohClass> to_reals(const CohClass& c);

std::string profile_kind_name(ProfileKind k);

} // namespace kq
