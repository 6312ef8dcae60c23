#include "jointsem/io/frames.hpp"

#include <fstream>
#include <initializer_list>
#include <json.hpp>

#include "jointsem/core/error.hpp"

namespace jointsem {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

class Record {
 public:
  Record(const std::string& source, long line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

  template <typename J>
  void require_object(const J& j, const std::string& where,
                      std::initializer_list<const char*> required,
                      std::initializer_list<const char*> optional = {}) const {
    if (!j.is_object()) fail(where + " must be an object");
    for (const char* key : required) {
      if (!j.contains(key)) fail(where + " lacks field '" + key + "'");
    }
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      for (const char* k : required) known = known || key == k;
      for (const char* k : optional) known = known || key == k;
      if (!known) fail(where + " has unknown field '" + key + "'");
    }
  }

  template <typename J>
  std::string string(const J& j, const std::string& what) const {
    if (!j.is_string()) fail(what + " must be a string");
    return j.template get<std::string>();
  }

  template <typename J>
  int integer(const J& j, const std::string& what) const {
    if (!j.is_number_integer()) fail(what + " must be an integer");
    return j.template get<int>();
  }

  template <typename J>
  std::vector<std::string> strings(const J& j, const std::string& what) const {
    if (!j.is_array()) fail(what + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(string(e, what + " entry"));
    return out;
  }

 private:
  const std::string& source_;
  long line_;
};

Sentence parse_sentence(const json& j, const Record& r, const Ontology& ontology) {
  r.require_object(j, "record", {"id", "tokens"}, {"lemmas", "pos", "annotations"});
  Sentence s;
  s.id = r.string(j["id"], "id");
  auto forms = r.strings(j["tokens"], "tokens");
  auto lemmas = j.contains("lemmas") ? r.strings(j["lemmas"], "lemmas") : forms;
  auto pos = j.contains("pos") ? r.strings(j["pos"], "pos") : std::vector<std::string>(forms.size());
  if (lemmas.size() != forms.size() || pos.size() != forms.size()) {
    r.fail("tokens, lemmas and pos differ in length");
  }
  if (forms.empty()) r.fail("sentence has no tokens");
  for (std::size_t k = 0; k < forms.size(); ++k) s.tokens.push_back({forms[k], lemmas[k], pos[k]});

  FrameAnnotations annotations;
  if (j.contains("annotations")) {
    if (!j["annotations"].is_array()) r.fail("annotations must be an array");
    for (const json& a : j["annotations"]) {
      r.require_object(a, "annotation", {"target", "lu"}, {"frame", "arguments"});
      const json& t = a["target"];
      if (!t.is_array() || t.size() != 2) r.fail("target must be [start, end]");
      FrameParse parse;
      parse.target = {r.integer(t[0], "target start"), r.integer(t[1], "target end"), r.string(a["lu"], "lu")};
      if (a.contains("frame")) parse.frame = r.string(a["frame"], "frame");
      if (a.contains("arguments")) {
        if (!a["arguments"].is_array()) r.fail("arguments must be an array");
        for (const json& arg : a["arguments"]) {
          r.require_object(arg, "argument", {"start", "end", "role"});
          parse.arguments.push_back(
              {r.integer(arg["start"], "start"), r.integer(arg["end"], "end"), r.string(arg["role"], "role")});
        }
      }
      try {
        if (parse.frame.empty()) {
          if (!parse.arguments.empty()) r.fail("arguments without a frame");
          const Target& t = parse.target;
          if (t.start < 0 || t.start > t.end || t.end >= s.size()) r.fail("target out of range");
          if (ontology.lu_id(t.lu) < 0) r.fail("unknown lexical unit '" + t.lu + "'");
        } else {
          validate(parse, ontology, s.size(), s.size());
        }
      } catch (const ParseError&) {
        throw;
      } catch (const ValidationError& e) {
        r.fail(e.what());
      }
      annotations.parses.push_back(std::move(parse));
    }
  }
  s.supervision = std::move(annotations);
  return s;
}

std::ifstream open_in(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ValidationError(std::string("cannot open ") + what + " file '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path, const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(std::string("cannot write ") + what + " file '" + path + "'");
  return out;
}

}  // namespace

std::vector<Sentence> read_frames(std::istream& in, const Ontology& ontology, const std::string& source) {
  std::vector<Sentence> out;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Record record(source, number);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) record.fail("malformed JSON");
    out.push_back(parse_sentence(j, record, ontology));
  }
  return out;
}

std::vector<Sentence> read_frames(const std::string& path, const Ontology& ontology) {
  auto in = open_in(path, "frames");
  return read_frames(in, ontology, path);
}

void write_frames(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const Sentence& s : sentences) {
    ordered j;
    j["id"] = s.id;
    ordered forms = ordered::array(), lemmas = ordered::array(), pos = ordered::array();
    for (const Token& t : s.tokens) {
      forms.push_back(t.form);
      lemmas.push_back(t.lemma);
      pos.push_back(t.pos);
    }
    j["tokens"] = forms;
    j["lemmas"] = lemmas;
    j["pos"] = pos;
    ordered annotations = ordered::array();
    if (const FrameAnnotations* frames = s.frames()) {
      for (const FrameParse& p : frames->parses) {
        ordered a;
        a["target"] = {p.target.start, p.target.end};
        a["lu"] = p.target.lu;
        a["frame"] = p.frame;
        ordered args = ordered::array();
        for (const ArgumentSpan& arg : p.arguments) {
          args.push_back(ordered{{"start", arg.start}, {"end", arg.end}, {"role", arg.role}});
        }
        a["arguments"] = args;
        annotations.push_back(a);
      }
    }
    j["annotations"] = annotations;
    out << j.dump() << '\n';
  }
}

void write_frames(const std::string& path, const std::vector<Sentence>& sentences) {
  auto out = open_out(path, "frames");
  write_frames(out, sentences);
}

Ontology read_ontology(std::istream& in, const std::string& source) {
  ordered j = ordered::parse(in, nullptr, false);
  Record r(source, 1);
  if (j.is_discarded()) r.fail("malformed JSON");
  r.require_object(j, "ontology", {"frames", "lus"});
  Ontology ontology;
  if (!j["frames"].is_object()) r.fail("frames must be an object");
  for (const auto& [name, body] : j["frames"].items()) {
    r.require_object(body, "frame '" + name + "'", {"roles"});
    ontology.add_frame(name, r.strings(body["roles"], "roles of frame '" + name + "'"));
  }
  if (!j["lus"].is_object()) r.fail("lus must be an object");
  for (const auto& [lu, frames] : j["lus"].items()) {
    auto names = r.strings(frames, "frames of '" + lu + "'");
    for (const std::string& f : names) {
      if (ontology.frame_id(f) < 0) r.fail("lexical unit '" + lu + "' lists undefined frame '" + f + "'");
    }
    ontology.add_lu(lu, names);
  }
  try {
    ontology.validate();
  } catch (const ValidationError& e) {
    r.fail(e.what());
  }
  return ontology;
}

Ontology read_ontology(const std::string& path) {
  auto in = open_in(path, "ontology");
  return read_ontology(in, path);
}

void write_ontology(std::ostream& out, const Ontology& ontology) {
  ordered frames = ordered::object();
  for (int f = 0; f < ontology.num_frames(); ++f) {
    ordered roles = ordered::array();
    for (int role : ontology.roles_of(f)) roles.push_back(ontology.role_name(role));
    frames[ontology.frame_name(f)] = ordered{{"roles", roles}};
  }
  ordered lus = ordered::object();
  for (int l = 0; l < ontology.num_lus(); ++l) {
    ordered names = ordered::array();
    for (int f : ontology.frames_of(l)) names.push_back(ontology.frame_name(f));
    lus[ontology.lu_name(l)] = names;
  }
  out << ordered{{"frames", frames}, {"lus", lus}}.dump(2) << '\n';
}

void write_ontology(const std::string& path, const Ontology& ontology) {
  auto out = open_out(path, "ontology");
  write_ontology(out, ontology);
}

}  // namespace jointsem
