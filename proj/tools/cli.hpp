#pragma once

// Command-line front end. Kept in a header so the tests can drive it in-process.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skdiff/skdiff.hpp"

namespace skdiff::cli {

enum ExitCode { kOk = 0, kUsage = 1, kParse = 2, kInfeasible = 3, kValidation = 4 };

struct UsageError : Error {
  using Error::Error;
};

struct InputOptions {
  std::string path;
  int part = 1;
  int segment_bars = 2;
  std::string anacrusis = "pad";
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw UsageError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline bool is_musicxml(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".xml" || ext == ".musicxml";
}

inline Melody load_melody(const InputOptions& in, std::ostream& err) {
  const std::filesystem::path path(in.path);
  if (!std::filesystem::is_regular_file(path)) throw UsageError("input file not found: " + in.path);
  if (path.extension() == ".lsht") return parse_leadsheet_text(read_file(path));
  if (!is_musicxml(path)) throw UsageError("unsupported input type '" + path.extension().string() + "'");

  std::vector<std::string> warnings;
  std::ifstream file(path, std::ios::binary);
  const auto parts = parse_musicxml(file, &warnings);
  for (const std::string& w : warnings) err << "warning: " << w << "\n";
  if (in.part < 1 || static_cast<std::size_t>(in.part) > parts.size()) {
    throw UsageError("--part " + std::to_string(in.part) + " out of range (score has " +
                     std::to_string(parts.size()) + " parts)");
  }
  ExtractOptions options;
  options.anacrusis = in.anacrusis == "drop" ? AnacrusisMode::drop : AnacrusisMode::pad;
  return extract_lead(parts, static_cast<std::size_t>(in.part - 1), options);
}

inline std::vector<Segment> load_segments(const InputOptions& in, std::ostream& err) {
  return segment_melody(load_melody(in, err), in.segment_bars);
}

inline const Segment& segment_at(const std::vector<Segment>& segments, int number) {
  if (number < 1 || static_cast<std::size_t>(number) > segments.size()) {
    throw UsageError("segment " + std::to_string(number) + " out of range (1.." + std::to_string(segments.size()) + ")");
  }
  return segments[static_cast<std::size_t>(number - 1)];
}

inline void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("input", in.path, "Lead sheet (.lsht) or MusicXML (.xml, .musicxml)")->required();
  cmd->add_option("--part", in.part, "Part to read from MusicXML, 1-based")->check(CLI::PositiveNumber);
  cmd->add_option("--segment-bars", in.segment_bars, "Bars per segment")->check(CLI::IsMember({1, 2}));
  cmd->add_option("--anacrusis", in.anacrusis, "Pickup bar handling")->check(CLI::IsMember({"pad", "drop"}));
}

/// Runs the tool; output goes to `out` unless --out names a file.
inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Melodic reduction trees and their pairwise comparison"};
  app.require_subcommand(1);
  std::string out_path;
  std::string format;
  int max_depth = 0;

  InputOptions reduce_in;
  int reduce_segment = 0;
  auto* reduce = app.add_subcommand("reduce", "Build reduction trees of the segments");
  add_input_options(reduce, reduce_in);
  reduce->add_option("--segment", reduce_segment, "Only this segment, 1-based");

  InputOptions diff_in;
  int left = 0, right = 0;
  auto* diff = app.add_subcommand("diff", "Compare two segments, earlier first");
  add_input_options(diff, diff_in);
  diff->add_option("--left", left, "Earlier segment, 1-based")->required();
  diff->add_option("--right", right, "Later segment, 1-based")->required();

  InputOptions analyze_in;
  std::string pairs = "forward";
  std::vector<int> sections;
  bool include_partial = false;
  int top_levels = -1;
  auto* analyze = app.add_subcommand("analyze", "Compare all selected forward pairs and report structure");
  add_input_options(analyze, analyze_in);
  analyze->add_option("--pairs", pairs, "Pair selection")->check(CLI::IsMember({"forward", "adjacent", "figure2"}));
  analyze->add_option("--sections", sections, "Section lengths in bars; compare only within a section")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  analyze->add_flag("--include-partial", include_partial, "Also compare a trailing partial segment");
  analyze->add_option("--top-levels", top_levels, "Levels that must agree for a variation (default: upper half)");

  std::string corpus_dir;
  auto* validate = app.add_subcommand("validate-corpus", "Check downloaded corpus files against the manifest");
  validate->add_option("dir", corpus_dir, "Directory holding the MusicXML files")->required();

  auto* fetch = app.add_subcommand("fetch-info", "Print corpus download instructions");

  for (auto* cmd : {reduce, diff, analyze}) {
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "dot", "text"}));
    cmd->add_option("--max-depth", max_depth, "Omit tree levels below this depth (DOT and text)")
        ->check(CLI::NonNegativeNumber);
  }
  validate->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
  for (auto* cmd : {reduce, diff, analyze, validate, fetch}) cmd->add_option("--out", out_path, "Write output to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : kUsage;
  }

  std::ostringstream result;
  int status = kOk;
  try {
    if (*reduce) {
      const auto segments = load_segments(reduce_in, err);
      std::vector<SkTree> trees;
      if (reduce_segment != 0) trees.push_back(build_sk_tree(segment_at(segments, reduce_segment)));
      else for (const Segment& s : segments) trees.push_back(build_sk_tree(s));
      if (format == "dot") {
        result << (trees.size() == 1 ? export_sk_tree_dot(trees.front(), max_depth) : export_sk_trees_dot(trees, max_depth));
      } else if (format == "text") {
        for (const SkTree& t : trees) result << export_sk_tree_text(t);
      } else {
        result << (reduce_segment != 0 ? export_sk_tree_json(trees.front()) : export_sk_trees_json(trees));
      }
    } else if (*diff) {
      if (left >= right) {
        throw UsageError("segments are compared forward only: --left must be before --right (got " +
                         std::to_string(left) + ", " + std::to_string(right) + ")");
      }
      const auto segments = load_segments(diff_in, err);
      const DiffTree d = build_diff_tree(build_sk_tree(segment_at(segments, left)),
                                         build_sk_tree(segment_at(segments, right)));
      if (format == "dot") result << export_diff_tree_dot(d, max_depth);
      else if (format == "text") result << export_diff_tree_text(d, max_depth);
      else result << export_diff_tree_json(d);
    } else if (*analyze) {
      const auto segments = load_segments(analyze_in, err);
      AnalysisOptions options;
      options.pairs = *parse_pair_preset(pairs);
      options.section_bars = sections;
      options.include_partial = include_partial;
      const PairwiseMatrix m =
          pairwise_analysis(segments, options, std::filesystem::path(analyze_in.path).stem().string());
      const StructureReport r = structure_report(m, ClassifyOptions{top_levels});
      if (format == "dot") result << export_pairwise_dot(m, max_depth);
      else if (format == "text") result << export_pairwise_report_text(m, r);
      else result << export_pairwise_report_json(m, r);
    } else if (*validate) {
      const std::filesystem::path dir(corpus_dir);
      if (!std::filesystem::is_directory(dir)) throw UsageError("corpus directory not found: " + corpus_dir);
      const CorpusManifest manifest = load_manifest();
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_musicxml(entry.path())) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      std::map<int, std::vector<ScorePart>> pieces;
      std::map<int, std::string> parse_errors;
      for (const auto& f : files) {
        const auto number = piece_number_for_file(f);
        if (!number || pieces.count(*number) || parse_errors.count(*number)) {
          err << "warning: ignoring " << f.filename().string() << "\n";
          continue;
        }
        try {
          std::ifstream file(f, std::ios::binary);
          pieces[*number] = parse_musicxml(file);
        } catch (const Error& e) {
          parse_errors[*number] = f.filename().string() + ": " + e.what();
        }
      }
      const ValidationReport report = validate_regularities(manifest, pieces, parse_errors);
      result << (format == "text" ? export_validation_report_text(report) : export_validation_report_json(report));
      if (!report.ok()) status = kValidation;
    } else if (*fetch) {
      result << fetch_instructions();
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const MelodyError& e) {
    err << "invalid melody: " << e.what() << "\n";
    return kParse;
  } catch (const InfeasibleError& e) {
    err << "analysis infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ComparisonError& e) {
    err << "comparison error: " << e.what() << "\n";
    return kInfeasible;
  }

  if (out_path.empty()) {
    out << result.str();
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << out_path << "\n";
      return kUsage;
    }
    file << result.str();
  }
  return status;
}

}  // namespace skdiff::cli
