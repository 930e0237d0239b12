#include "braidcell/curve.hpp"

#include <algorithm>
#include <sstream>

#include "braidcell/chains.hpp"
#include "braidcell/error.hpp"
#include "text.hpp"

namespace braidcell {

namespace {

struct WalkError {
  std::size_t token = 0;
  std::string message;
};

std::variant<Walk, WalkError> simulate(const Surface& s, const StrandWord& strand) {
  if (!s.valid_face(strand.start_face)) {
    return WalkError{0, "unknown start face " + std::to_string(strand.start_face)};
  }
  Walk w;
  w.faces.push_back(strand.start_face);
  w.winds.push_back(0);
  for (std::size_t i = 0; i < strand.tokens.size(); ++i) {
    const CurveToken& t = strand.tokens[i];
    if (const auto* x = std::get_if<Cross>(&t)) {
      if (!s.valid_edge(x->edge.edge) || (x->edge.sign != 1 && x->edge.sign != -1)) {
        return WalkError{i, "unknown edge " + std::to_string(x->edge.edge)};
      }
      FaceId here = w.faces.back();
      if (s.from_face(x->edge) != here) {
        return WalkError{i, "edge " + std::to_string(x->edge.edge) +
                                (x->edge.sign > 0 ? " (+)" : " (-)") +
                                " does not leave the current face " + std::to_string(here)};
      }
      w.faces.push_back(s.to_face(x->edge));
      w.winds.push_back(0);
    } else {
      w.winds.back() += std::get<Wind>(t).turns;
    }
  }
  return w;
}

}  // namespace

bool Walk::has_winding() const {
  return std::any_of(winds.begin(), winds.end(), [](std::int64_t w) { return w != 0; });
}

Walk to_walk(const Surface& s, const StrandWord& strand) {
  auto r = simulate(s, strand);
  if (auto* err = std::get_if<WalkError>(&r)) {
    throw ValidationError("crossing consistency",
                          "token " + std::to_string(err->token) + ": " + err->message);
  }
  return std::get<Walk>(std::move(r));
}

StrandWord to_strand(const Surface& s, const Walk& walk) {
  if (walk.faces.empty() || walk.faces.size() != walk.winds.size()) {
    throw PreconditionError("malformed walk");
  }
  StrandWord out;
  out.start_face = walk.faces.front();
  for (std::size_t i = 0; i < walk.faces.size(); ++i) {
    if (i > 0) {
      auto se = s.incident_edge(walk.faces[i - 1], walk.faces[i]);
      if (!se) {
        throw PreconditionError("walk steps between non-adjacent faces " +
                                std::to_string(walk.faces[i - 1]) + " and " +
                                std::to_string(walk.faces[i]));
      }
      out.tokens.emplace_back(Cross{*se});
    }
    if (walk.winds[i] != 0) out.tokens.emplace_back(Wind{walk.winds[i]});
  }
  return out;
}

GeneratorWord sigma_power(EdgeId e, std::int64_t exponent) {
  GeneratorWord w;
  int sign = exponent < 0 ? -1 : 1;
  for (std::int64_t i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) {
    w.letters.push_back({e, sign});
  }
  return w;
}

Permutation::Permutation(std::vector<FaceId> image) : image_(std::move(image)) {
  std::vector<char> hit(image_.size(), 0);
  for (FaceId j : image_) {
    if (j < 0 || j >= size() || hit[j]) throw PreconditionError("not a permutation");
    hit[j] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<FaceId> image(n);
  for (int i = 0; i < n; ++i) image[i] = i;
  return Permutation(std::move(image));
}

Permutation Permutation::transposition(int n, FaceId a, FaceId b) {
  Permutation p = identity(n);
  std::swap(p.image_.at(a), p.image_.at(b));
  return p;
}

bool Permutation::is_identity() const {
  for (int i = 0; i < size(); ++i) {
    if (image_[i] != i) return false;
  }
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<FaceId> inv(image_.size());
  for (int i = 0; i < size(); ++i) inv[image_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation Permutation::after(const Permutation& inner) const {
  if (inner.size() != size()) throw PreconditionError("permutation size mismatch");
  std::vector<FaceId> out(image_.size());
  for (int i = 0; i < size(); ++i) out[i] = image_[inner.image_[i]];
  return Permutation(std::move(out));
}

std::vector<CurveToken> normalize_tokens(std::vector<CurveToken> tokens) {
  std::vector<CurveToken> out;
  out.reserve(tokens.size());
  for (CurveToken& t : tokens) {
    if (auto* w = std::get_if<Wind>(&t)) {
      if (!out.empty()) {
        if (auto* prev = std::get_if<Wind>(&out.back())) {
          prev->turns += w->turns;
          if (prev->turns == 0) out.pop_back();
          continue;
        }
      }
      if (w->turns == 0) continue;
    }
    out.push_back(t);
  }
  return out;
}

CurveSystem::CurveSystem(std::shared_ptr<const Surface> surface, std::vector<StrandWord> strands)
    : surface_(std::move(surface)), strands_(std::move(strands)) {
  if (!surface_) throw PreconditionError("curve system without a surface");
  const Surface& s = *surface_;
  if (static_cast<int>(strands_.size()) != s.face_count()) {
    throw ValidationError("strand count", "expected " + std::to_string(s.face_count()) +
                                              " strands, got " + std::to_string(strands_.size()));
  }
  std::vector<char> ends(s.face_count(), 0);
  for (FaceId j = 0; j < s.face_count(); ++j) {
    StrandWord& strand = strands_[j];
    if (strand.start_face != j) {
      throw ValidationError("strand start", "strand " + std::to_string(j) +
                                                " must start at face " + std::to_string(j));
    }
    strand.tokens = normalize_tokens(std::move(strand.tokens));
    try {
      walks_.push_back(to_walk(s, strand));
    } catch (const ValidationError& e) {
      throw ValidationError(e.invariant(), "strand " + std::to_string(j) + ", " +
                                               std::string(e.what()).substr(e.invariant().size() + 2));
    }
    FaceId end = walks_.back().back();
    if (ends[end]) {
      throw ValidationError("end permutation",
                            "two strands end on face " + std::to_string(end));
    }
    ends[end] = 1;
  }
}

CurveSystem CurveSystem::identity(std::shared_ptr<const Surface> surface) {
  std::vector<StrandWord> strands;
  for (FaceId j = 0; j < surface->face_count(); ++j) strands.push_back({j, {}});
  return CurveSystem(std::move(surface), std::move(strands));
}

std::string serialize_tokens(const std::vector<CurveToken>& tokens) {
  std::ostringstream out;
  bool first = true;
  for (const CurveToken& t : tokens) {
    if (!first) out << ' ';
    first = false;
    if (const auto* x = std::get_if<Cross>(&t)) {
      out << 'x' << (x->edge.sign > 0 ? '+' : '-') << x->edge.edge;
    } else {
      out << 'w' << std::get<Wind>(t).turns;
    }
  }
  return out.str();
}

namespace {

CurveToken parse_token(const detail::Line& line, std::size_t i) {
  std::string_view t = line.at(i).text;
  if (t.size() >= 3 && t[0] == 'x' && (t[1] == '+' || t[1] == '-')) {
    std::int64_t e = 0;
    std::string_view digits = t.substr(2);
    if (!digits.empty() && digits[0] != '+' && digits[0] != '-' &&
        detail::parse_int(digits, e) && e <= INT32_MAX) {
      return Cross{{static_cast<EdgeId>(e), t[1] == '+' ? 1 : -1}};
    }
  } else if (t.size() >= 2 && t[0] == 'w') {
    std::int64_t k = 0;
    if (detail::parse_int(t.substr(1), k)) return Wind{k};
  }
  line.fail(i, "expected a token x<+|-><edge> or w<turns>");
}

}  // namespace

CurveSystem parse_curve(std::shared_ptr<const Surface> surface, std::string_view text) {
  auto lines = detail::tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty curve file");
  const auto& head = lines[0];
  detail::expect_keyword(head, 0, "curve");
  head.expect_size(2);
  if (head.tokens[1].text != surface->name()) {
    head.fail(1, "curve is for surface '" + std::string(head.tokens[1].text) +
                     "', not '" + surface->name() + "'");
  }
  const int n = surface->face_count();
  std::vector<StrandWord> strands(n);
  std::vector<char> seen(n, 0);
  std::size_t li = 1;
  bool ended = false;
  for (; li < lines.size(); ++li) {
    const auto& line = lines[li];
    if (line.at(0).text == "end") {
      line.expect_size(1);
      ended = true;
      ++li;
      break;
    }
    detail::expect_keyword(line, 0, "strand");
    int j = detail::id_at(line, 1);
    if (j >= n) line.fail(1, "strand id out of range");
    if (seen[j]) line.fail(1, "duplicate strand");
    seen[j] = 1;
    detail::expect_keyword(line, 2, ":");
    StrandWord strand{j, {}};
    for (std::size_t i = 3; i < line.tokens.size(); ++i) {
      strand.tokens.push_back(parse_token(line, i));
    }
    auto sim = simulate(*surface, strand);
    if (auto* err = std::get_if<WalkError>(&sim)) {
      line.fail(3 + err->token, "crossing consistency: strand " + std::to_string(j) +
                                    ", token " + std::to_string(err->token) + ": " +
                                    err->message);
    }
    strands[j] = std::move(strand);
  }
  if (!ended) throw ParseError(lines.back().number + 1, 1, "missing 'end'");
  if (li < lines.size()) lines[li].fail(0, "content after 'end'");
  for (int j = 0; j < n; ++j) {
    if (!seen[j]) throw ParseError(lines.back().number, 1, "missing strand " + std::to_string(j));
  }
  return CurveSystem(std::move(surface), std::move(strands));
}

std::string serialize_curve(const CurveSystem& curve) {
  std::ostringstream out;
  out << "curve " << curve.surface().name() << "\n";
  for (const StrandWord& s : curve.strands()) {
    out << "strand " << s.start_face << " :";
    if (!s.tokens.empty()) out << ' ' << serialize_tokens(s.tokens);
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

std::string serialize_letters(const GeneratorWord& word) {
  std::ostringstream out;
  for (std::size_t i = 0; i < word.letters.size(); ++i) {
    if (i) out << ' ';
    out << 'e' << word.letters[i].edge << '^' << (word.letters[i].exponent > 0 ? "+1" : "-1");
  }
  return out.str();
}

namespace {

GeneratorWord letters_from_line(const Surface& surface, const detail::Line& line, std::size_t first) {
  GeneratorWord w;
  for (std::size_t i = first; i < line.tokens.size(); ++i) {
    std::string_view t = line.tokens[i].text;
    auto caret = t.find('^');
    std::int64_t e = 0;
    if (t.size() < 4 || t[0] != 'e' || caret == std::string_view::npos ||
        !detail::parse_int(t.substr(1, caret - 1), e) || t[1] == '+' || t[1] == '-') {
      line.fail(i, "expected a letter e<edge>^<+1|-1>");
    }
    std::string_view exp = t.substr(caret + 1);
    int exponent = exp == "+1" || exp == "1" ? 1 : exp == "-1" ? -1 : 0;
    if (exponent == 0) line.fail(i, "exponent must be +1 or -1");
    if (!surface.valid_edge(static_cast<int>(e))) line.fail(i, "unknown edge");
    w.letters.push_back({static_cast<EdgeId>(e), exponent});
  }
  return w;
}

}  // namespace

GeneratorWord parse_letters(const Surface& surface, std::string_view text) {
  auto lines = detail::tokenize(text);
  if (lines.empty()) return {};
  if (lines.size() > 1) lines[1].fail(0, "expected a single line of letters");
  return letters_from_line(surface, lines[0], 0);
}

GeneratorWord parse_word(const Surface& surface, std::string_view text) {
  auto lines = detail::tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty word file");
  const auto& head = lines[0];
  detail::expect_keyword(head, 0, "word");
  head.expect_size(2);
  if (head.tokens[1].text != surface.name()) {
    head.fail(1, "word is for surface '" + std::string(head.tokens[1].text) + "', not '" +
                     surface.name() + "'");
  }
  if (lines.size() < 3) throw ParseError(head.number + 1, 1, "expected 'letters' and 'end'");
  detail::expect_keyword(lines[1], 0, "letters");
  GeneratorWord w = letters_from_line(surface, lines[1], 1);
  detail::expect_keyword(lines[2], 0, "end");
  lines[2].expect_size(1);
  if (lines.size() > 3) lines[3].fail(0, "content after 'end'");
  return w;
}

std::string serialize_word(const Surface& surface, const GeneratorWord& word) {
  std::string letters = serialize_letters(word);
  return "word " + surface.name() + "\nletters" + (letters.empty() ? "" : " " + letters) +
         "\nend\n";
}

CurveSystem sigma(std::shared_ptr<const Surface> surface, EdgeId e, int exponent) {
  if (!surface->valid_edge(e)) throw PreconditionError("unknown edge " + std::to_string(e));
  if (exponent != 1 && exponent != -1) throw PreconditionError("exponent must be +1 or -1");
  const DualEdge& d = surface->edge(e);
  std::vector<StrandWord> strands;
  for (FaceId j = 0; j < surface->face_count(); ++j) strands.push_back({j, {}});
  strands[d.tail].tokens.emplace_back(Cross{{e, 1}});
  strands[d.head].tokens.emplace_back(Cross{{e, -1}});
  return CurveSystem(std::move(surface), std::move(strands));
}

Permutation permutation_of(const CurveSystem& curve) {
  std::vector<FaceId> image;
  for (FaceId j = 0; j < curve.surface().face_count(); ++j) image.push_back(curve.walk(j).back());
  return Permutation(std::move(image));
}

Permutation permutation_of(const Surface& surface, const GeneratorWord& word) {
  Permutation p = Permutation::identity(surface.face_count());
  // Leftmost letter acts last.
  for (const Letter& l : word.letters) {
    const DualEdge& d = surface.edge(l.edge);
    p = p.after(Permutation::transposition(surface.face_count(), d.tail, d.head));
  }
  return p;
}

bool is_balanced(const CurveSystem& curve) { return edge_chain_of(curve).is_zero(); }

bool is_palindrome(const std::vector<FaceId>& faces) {
  if (faces.empty()) throw PreconditionError("empty face set");
  if (faces.size() % 2 == 0) return false;
  return std::equal(faces.begin(), faces.begin() + faces.size() / 2, faces.rbegin());
}

CurveSystem compose(const CurveSystem& gamma, const CurveSystem& delta) {
  if (gamma.surface_ptr() != delta.surface_ptr() && !(gamma.surface() == delta.surface())) {
    throw PreconditionError("surface mismatch");
  }
  std::vector<StrandWord> strands;
  for (FaceId j = 0; j < delta.surface().face_count(); ++j) {
    StrandWord s{j, delta.strand(j).tokens};
    const auto& tail = gamma.strand(delta.walk(j).back()).tokens;
    s.tokens.insert(s.tokens.end(), tail.begin(), tail.end());
    strands.push_back(std::move(s));
  }
  return CurveSystem(delta.surface_ptr(), std::move(strands));
}

CurveSystem invert(const CurveSystem& gamma) {
  const int n = gamma.surface().face_count();
  std::vector<StrandWord> strands(n);
  for (FaceId j = 0; j < n; ++j) {
    FaceId start = gamma.walk(j).back();
    StrandWord s{start, {}};
    const auto& tokens = gamma.strand(j).tokens;
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
      if (const auto* x = std::get_if<Cross>(&*it)) {
        s.tokens.emplace_back(Cross{{x->edge.edge, -x->edge.sign}});
      } else {
        s.tokens.emplace_back(Wind{-std::get<Wind>(*it).turns});
      }
    }
    strands[start] = std::move(s);
  }
  return CurveSystem(gamma.surface_ptr(), std::move(strands));
}

CurveSystem curve_of_word(std::shared_ptr<const Surface> surface, const GeneratorWord& word) {
  // Same as folding compose over sigma curves, without rebuilding the
  // system per letter: track which strand sits on each face.
  const Surface& s = *surface;
  std::vector<StrandWord> strands;
  std::vector<FaceId> occupant(s.face_count());
  for (FaceId j = 0; j < s.face_count(); ++j) {
    strands.push_back({j, {}});
    occupant[j] = j;
  }
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
    if (!s.valid_edge(it->edge)) throw PreconditionError("unknown edge " + std::to_string(it->edge));
    const DualEdge& d = s.edge(it->edge);
    strands[occupant[d.tail]].tokens.emplace_back(Cross{{it->edge, 1}});
    strands[occupant[d.head]].tokens.emplace_back(Cross{{it->edge, -1}});
    std::swap(occupant[d.tail], occupant[d.head]);
  }
  return CurveSystem(std::move(surface), std::move(strands));
}

std::size_t measure(const CurveSystem& curve) {
  std::size_t total = 0;
  for (FaceId j = 0; j < curve.surface().face_count(); ++j) total += curve.walk(j).crossings();
  return total;
}

}  // namespace braidcell
