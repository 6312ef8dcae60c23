#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace jointsem {

/// Frame inventory: lexical units evoke frames, frames license roles.
///
/// Names are interned to dense ids in insertion order. Role names form one
/// global vocabulary so the same role string shares an embedding across frames.
class Ontology {
 public:
  /// Adds (or extends) a frame with the given roles. Duplicates are dropped.
  int add_frame(const std::string& frame, const std::vector<std::string>& roles);
  /// Adds (or extends) a lexical unit. Frames must be added separately.
  int add_lu(const std::string& lu, const std::vector<std::string>& frames);

  /// Checks that every LU-listed frame is defined and has at least one role.
  void validate() const;

  int frame_id(std::string_view name) const { return find(frame_ids_, name); }
  int role_id(std::string_view name) const { return find(role_ids_, name); }
  int lu_id(std::string_view name) const { return find(lu_ids_, name); }

  const std::string& frame_name(int id) const { return frames_.at(id); }
  const std::string& role_name(int id) const { return roles_.at(id); }
  const std::string& lu_name(int id) const { return lus_.at(id); }

  const std::vector<int>& frames_of(int lu) const { return lu_frames_.at(lu); }
  const std::vector<int>& roles_of(int frame) const { return frame_roles_.at(frame); }
  bool licenses(int frame, int role) const;

  int num_frames() const { return static_cast<int>(frames_.size()); }
  int num_roles() const { return static_cast<int>(roles_.size()); }
  int num_lus() const { return static_cast<int>(lus_.size()); }

  /// Stable 64-bit FNV-1a hash of the ontology contents.
  std::uint64_t fingerprint() const;

 private:
  static int find(const std::map<std::string, int, std::less<>>& ids, std::string_view name);
  int intern_frame(const std::string& name);
  int intern_role(const std::string& name);

  std::vector<std::string> frames_, roles_, lus_;
  std::map<std::string, int, std::less<>> frame_ids_, role_ids_, lu_ids_;
  std::vector<std::vector<int>> frame_roles_;
  std::vector<std::vector<int>> lu_frames_;
  std::vector<bool> frame_defined_;
};

}  // namespace jointsem
