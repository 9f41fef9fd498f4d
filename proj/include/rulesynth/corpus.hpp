// rulesynth/corpus.hpp - example corpora on disk and synthesis settings files.
//
//   <root>/changes/<id>/before.{mj,pdg}, after.{mj,pdg}
//   <root>/violating/*.{mj,pdg}
//   <root>/conforming/*.{mj,pdg}
//
// Change pairs are diffed: the tagged before joins the violating examples
// and the tagged after the conforming ones. Directories are read in name
// order so a corpus always yields the same example order.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rulesynth/pdg.hpp"
#include "rulesynth/synth.hpp"

namespace rulesynth {

struct Corpus {
  std::vector<Pdg> violating;
  std::vector<Pdg> conforming;
};

/// Builds a .mj method or reads a .pdg document. `display_name` becomes
/// the origin file of .mj examples.
Pdg load_example(const std::filesystem::path& path, const std::string& display_name = {});

/// Throws SchemaError for missing directories, incomplete change pairs or
/// unknown file types, and ParseError with the file name for bad sources.
Corpus load_corpus(const std::filesystem::path& root, const AlignOptions& options = {});

/// Example files of one directory in name order (empty when absent).
std::vector<std::filesystem::path> example_files(const std::filesystem::path& dir);

/// JSON settings: {"delta", "maxPartitions", "radius", "maxModels",
/// "solverCap"}; missing keys keep the values of `base`.
SynthConfig load_config_file(const std::filesystem::path& path, SynthConfig base = {});
std::string write_config(const SynthConfig& c);

}  // namespace rulesynth
