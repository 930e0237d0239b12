#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "braidcell/surface.hpp"

namespace braidcell {

/// Crossing of a dual edge.
struct Cross {
  SignedEdge edge;
  friend bool operator==(const Cross&, const Cross&) = default;
};

/// `turns` counterclockwise loops around the marked point of the current face.
struct Wind {
  std::int64_t turns = 0;
  friend bool operator==(const Wind&, const Wind&) = default;
};

using CurveToken = std::variant<Cross, Wind>;

/// One strand, tokens in time order.
struct StrandWord {
  FaceId start_face = 0;
  std::vector<CurveToken> tokens;
  friend bool operator==(const StrandWord&, const StrandWord&) = default;
};

/// The same strand viewed as visits: faces[i] is the i-th face entered and
/// winds[i] the winding accumulated during that visit.
struct Walk {
  std::vector<FaceId> faces;
  std::vector<std::int64_t> winds;

  std::size_t size() const { return faces.size(); }
  FaceId front() const { return faces.front(); }
  FaceId back() const { return faces.back(); }
  std::size_t crossings() const { return faces.empty() ? 0 : faces.size() - 1; }
  bool has_winding() const;

  friend bool operator==(const Walk&, const Walk&) = default;
};

/// Simulates tokens from the start face. Throws ValidationError
/// ("crossing consistency") naming the token index and expected face.
Walk to_walk(const Surface& s, const StrandWord& strand);
StrandWord to_strand(const Surface& s, const Walk& walk);

struct Letter {
  EdgeId edge = 0;
  int exponent = 1;  // +1 or -1
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Word in edge transpositions. Read right to left as a product: the last
/// letter acts first.
struct GeneratorWord {
  std::vector<Letter> letters;
  friend bool operator==(const GeneratorWord&, const GeneratorWord&) = default;
};

/// sigma_e^exponent as a run of |exponent| equal letters.
GeneratorWord sigma_power(EdgeId e, std::int64_t exponent);

/// j -> image[j].
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<FaceId> image);
  static Permutation identity(int n);
  static Permutation transposition(int n, FaceId a, FaceId b);

  FaceId operator()(FaceId j) const { return image_.at(j); }
  int size() const { return static_cast<int>(image_.size()); }
  const std::vector<FaceId>& image() const { return image_; }
  bool is_identity() const;
  Permutation inverse() const;
  /// (this o inner)(j) = this(inner(j)).
  Permutation after(const Permutation& inner) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<FaceId> image_;
};

/// One strand per face; strand j starts at face j. End faces form a
/// permutation. Token lists are kept normalized: no zero or adjacent Wind
/// tokens.
class CurveSystem {
 public:
  CurveSystem(std::shared_ptr<const Surface> surface, std::vector<StrandWord> strands);

  static CurveSystem identity(std::shared_ptr<const Surface> surface);

  const Surface& surface() const { return *surface_; }
  const std::shared_ptr<const Surface>& surface_ptr() const { return surface_; }
  const std::vector<StrandWord>& strands() const { return strands_; }
  const StrandWord& strand(FaceId j) const { return strands_.at(j); }
  /// Face sequence of strand j (crossings + 1 entries).
  const Walk& walk(FaceId j) const { return walks_.at(j); }

  friend bool operator==(const CurveSystem& a, const CurveSystem& b) {
    return *a.surface_ == *b.surface_ && a.strands_ == b.strands_;
  }

 private:
  std::shared_ptr<const Surface> surface_;
  std::vector<StrandWord> strands_;
  std::vector<Walk> walks_;
};

/// Drops zero windings and merges adjacent Wind tokens.
std::vector<CurveToken> normalize_tokens(std::vector<CurveToken> tokens);

CurveSystem parse_curve(std::shared_ptr<const Surface> surface, std::string_view text);
std::string serialize_curve(const CurveSystem& curve);
std::string serialize_tokens(const std::vector<CurveToken>& tokens);

GeneratorWord parse_word(const Surface& surface, std::string_view text);
std::string serialize_word(const Surface& surface, const GeneratorWord& word);
/// "e3^+1 e0^-1 ..." (empty string for the empty word).
std::string serialize_letters(const GeneratorWord& word);
GeneratorWord parse_letters(const Surface& surface, std::string_view text);

/// The curve of sigma_e: strand tail(e) crosses e forward, strand head(e)
/// crosses it backward. The exponent does not change the crossing datum.
CurveSystem sigma(std::shared_ptr<const Surface> surface, EdgeId e, int exponent = 1);

Permutation permutation_of(const CurveSystem& curve);
Permutation permutation_of(const Surface& surface, const GeneratorWord& word);

bool is_balanced(const CurveSystem& curve);
bool is_palindrome(const std::vector<FaceId>& faces);

/// delta runs first; strand j continues along gamma's strand starting where
/// delta's strand j ended.
CurveSystem compose(const CurveSystem& gamma, const CurveSystem& delta);
CurveSystem invert(const CurveSystem& gamma);

/// Product of sigma curves, rightmost letter first in time.
CurveSystem curve_of_word(std::shared_ptr<const Surface> surface, const GeneratorWord& word);

/// Total crossing count.
std::size_t measure(const CurveSystem& curve);

}  // namespace braidcell
