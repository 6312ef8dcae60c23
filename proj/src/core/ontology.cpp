#include "jointsem/core/ontology.hpp"

#include <algorithm>

#include "jointsem/core/error.hpp"

namespace jointsem {

namespace {

void append_unique(std::vector<int>& ids, int id) {
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
}

void fnv_mix(std::uint64_t& hash, std::string_view bytes) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  hash ^= 0xff;
  hash *= 1099511628211ULL;
}

}  // namespace

int Ontology::find(const std::map<std::string, int, std::less<>>& ids, std::string_view name) {
  auto it = ids.find(name);
  return it == ids.end() ? -1 : it->second;
}

int Ontology::intern_frame(const std::string& name) {
  auto [it, inserted] = frame_ids_.emplace(name, static_cast<int>(frames_.size()));
  if (inserted) {
    frames_.push_back(name);
    frame_roles_.emplace_back();
    frame_defined_.push_back(false);
  }
  return it->second;
}

int Ontology::intern_role(const std::string& name) {
  auto [it, inserted] = role_ids_.emplace(name, static_cast<int>(roles_.size()));
  if (inserted) roles_.push_back(name);
  return it->second;
}

int Ontology::add_frame(const std::string& frame, const std::vector<std::string>& roles) {
  int id = intern_frame(frame);
  frame_defined_[id] = true;
  for (const auto& role : roles) append_unique(frame_roles_[id], intern_role(role));
  return id;
}

int Ontology::add_lu(const std::string& lu, const std::vector<std::string>& frames) {
  auto [it, inserted] = lu_ids_.emplace(lu, static_cast<int>(lus_.size()));
  if (inserted) {
    lus_.push_back(lu);
    lu_frames_.emplace_back();
  }
  for (const auto& frame : frames) append_unique(lu_frames_[it->second], intern_frame(frame));
  return it->second;
}

bool Ontology::licenses(int frame, int role) const {
  const auto& roles = frame_roles_.at(frame);
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

void Ontology::validate() const {
  for (int lu = 0; lu < num_lus(); ++lu) {
    if (lu_frames_[lu].empty()) throw ValidationError("lexical unit '" + lus_[lu] + "' evokes no frame");
    for (int frame : lu_frames_[lu]) {
      if (!frame_defined_[frame]) {
        throw ValidationError("lexical unit '" + lus_[lu] + "' refers to undefined frame '" +
                              frames_[frame] + "'");
      }
      if (frame_roles_[frame].empty()) {
        throw ValidationError("frame '" + frames_[frame] + "' has no roles");
      }
    }
  }
}

std::uint64_t Ontology::fingerprint() const {
  std::uint64_t hash = 14695981039346656037ULL;
  for (int f = 0; f < num_frames(); ++f) {
    fnv_mix(hash, frames_[f]);
    for (int r : frame_roles_[f]) fnv_mix(hash, roles_[r]);
  }
  for (int l = 0; l < num_lus(); ++l) {
    fnv_mix(hash, lus_[l]);
    for (int f : lu_frames_[l]) fnv_mix(hash, frames_[f]);
  }
  return hash;
}

}  // namespace jointsem
