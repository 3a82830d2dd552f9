#ifndef ASDIM_IO_HPP
#define ASDIM_IO_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asdim/covers.hpp"
#include "asdim/gog.hpp"
#include "asdim/groups.hpp"
#include "asdim/simplicial.hpp"

namespace asdim {
namespace io {

// ---------------------------------------------------------------- spaces

std::string write_ball(const MetricSpace& s);
std::shared_ptr<DenseSpace> read_ball(const std::string& text);

// ----------------------------------------------------------- certificates

std::string write_certificate(const covers::ScaleDimCertificate& c);
covers::ScaleDimCertificate read_certificate(const std::string& text,
                                             const covers::SpaceRef& space);

// -------------------------------------------------------------- complexes

std::string write_complex(const simp::OrientedComplex& k);
simp::ComplexRef read_complex(const std::string& text);

std::string complex_dot(const simp::OrientedComplex& k);
std::string tree_ball_dot(const gog::GraphOfGroups::TreeBall& tb);
std::string cover_dot(const covers::Cover& c); // nerve 1-skeleton

// ----------------------------------------------------------------- models

struct ModelHandle {
    enum class Kind { Zm, Free, Finite, Gog };
    Kind kind = Kind::Zm;
    std::optional<groups::ZmModel> zm;
    std::optional<groups::FreeModel> free_model;
    std::optional<groups::FiniteTableModel> finite;
    std::shared_ptr<gog::GraphOfGroups> graph;
    std::string name;

    groups::CayleyBall ball(i64 radius,
                            i64 cap = groups::kDefaultElementCap) const;
};

ModelHandle parse_model(const std::string& text, const std::string& name);
std::shared_ptr<gog::GraphOfGroups> parse_gog(const std::string& text);

// Built-in models used by recipes and tests.
ModelHandle builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();
std::shared_ptr<gog::GraphOfGroups> builtin_gog(const std::string& name);

// ------------------------------------------------------------------ files

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace io
} // namespace asdim

#endif
