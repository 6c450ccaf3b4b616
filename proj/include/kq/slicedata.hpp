#pragma once

#include "kq/coeffrings.hpp"

#include <string>
#include <vector>

namespace kq {

struct OutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Theory { KQ_veff, kq_slices, KW_slices, KGL_slices };
enum class SpecTag { MZ, MZ2, VtildeS0KQ, Zero, MZ12 };

std::string theory_name(Theory t);
std::string spec_tag_name(SpecTag t);

struct Summand {
    Bidegree shift; // Sigma^{s+(w)}
    SpecTag tag = SpecTag::Zero;
    std::string generator;
    std::string d1; // first slice differential on this summand, when the paper states one
};

struct SliceDescriptor {
    Theory theory = Theory::KQ_veff;
    int q = 0;
    std::vector<Summand> summands;
    std::string note;
    std::string str() const;
    json to_json() const;
};

SliceDescriptor veff_slice_KQ(int q);
// KW generators eta^m sqrt(alpha)^n are listed for n in [n_min, n_max]
SliceDescriptor slice_descriptor(Theory t, int q, int n_min = -2, int n_max = 2);

// A layer of an E1/E2 cell. basis is present when the engine needs elementwise maps.
struct CellLayer {
    Group group;
    std::string label;
    std::set<std::string> flags;
    std::vector<CohClass> basis;
    bool has_basis = false;
    std::string role; // quot, sub or whole

    std::vector<Int> orders() const;
    json to_json() const;
};

// pi_{a-(b)} of the zeroth very effective slice: its filtration layers (quotient first)
struct VtildeValue {
    std::vector<CellLayer> layers;
    std::set<std::string> flags; // also set when a layer vanishes under an assumption
    Resolution resolution;
    std::string citation;
};
VtildeValue pi_vtilde0(const Profile& p, int a, int b);

struct PageEntry {
    enum Row { Vtilde, Mod2, Integral, Zero };
    int s = 0, q = 0, w = 0;
    Row row = Zero;
    int ca = 0, cb = 0; // V(ca, cb) or cohomology bidegree (ca, cb)
    std::vector<CellLayer> layers; // lowest filtration first
    std::set<std::string> flags;
    std::string provenance;

    bool is_zero() const;
    std::string source() const;
    json to_json() const;
};

PageEntry e1_entry_KQ(const Profile& p, int s, int q, int w);
// E1 of the slice spectral sequence of KGL: row q holds H^{2q-s-w, q-w}
PageEntry e1_entry_KGL(const Profile& p, int s, int q, int w);

CellLayer layer_from(const GroupWithBasis& g, const std::string& label);

} // namespace kq
