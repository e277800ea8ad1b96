// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver. Exit codes: 0 success, 1 runtime/data failure,
// 2 usage error (bad flags, bad config keys, unknown scheme/policy names).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ropelab/attention.hpp"
#include "ropelab/bf16.hpp"
#include "ropelab/diagnostics.hpp"
#include "ropelab/errors.hpp"
#include "ropelab/layout.hpp"
#include "ropelab/mask.hpp"
#include "ropelab/packing.hpp"
#include "ropelab/precision.hpp"
#include "ropelab/rng.hpp"

namespace {

using nlohmann::json;
using namespace ropelab;

// ---------------------------------------------------------------------------
// Config file overlay: a JSON object whose keys mirror the long flag names.
// Command-line flags win over config values; unknown keys are usage errors.

class ConfigOverlay {
 public:
  void bind(const std::string& key, CLI::Option* opt,
            std::function<void(const json&)> apply) {
    entries_[key] = Entry{opt, std::move(apply)};
  }

  void apply_file(const std::string& path) const {
    std::ifstream in(path);
    if (!in) {
      throw ConfigError("cannot open config file: " + path);
    }
    json root;
    try {
      root = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config file is not valid JSON: " +
                        std::string(e.what()));
    }
    if (!root.is_object()) {
      throw ConfigError("config file must hold a JSON object");
    }
    for (const auto& [key, value] : root.items()) {
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        throw ConfigError("unknown config key: \"" + key + "\"");
      }
      if (it->second.opt != nullptr && it->second.opt->count() > 0) {
        continue;  // explicit flag wins
      }
      it->second.apply(value);
    }
  }

 private:
  struct Entry {
    CLI::Option* opt = nullptr;
    std::function<void(const json&)> apply;
  };
  std::map<std::string, Entry> entries_;
};

std::int64_t config_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ConfigError("config key \"" + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

std::uint64_t config_uint(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() &&
                                   v.get<std::int64_t>() >= 0)) {
    throw ConfigError("config key \"" + key +
                      "\" must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string config_string(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw ConfigError("config key \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::vector<std::int64_t> config_int_list(const json& v,
                                          const std::string& key) {
  if (!v.is_array()) {
    throw ConfigError("config key \"" + key +
                      "\" must be an array of integers");
  }
  std::vector<std::int64_t> out;
  for (const json& e : v) {
    out.push_back(config_int(e, key));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared option bundles.

struct StackOpts {
  int layers = 2;
  int heads = 4;
  int d_model = 256;
};

struct RunOpts {
  std::uint64_t seed = 0;
  std::string policy_name = "fa2-bf16";
  int threads = 1;
  std::string out_path;   // CSV destination; empty = stdout
  std::string json_path;  // optional JSON mirror
  std::string config_path;
};

void add_stack_flags(CLI::App* sub, ConfigOverlay& overlay, StackOpts& s) {
  auto* layers = sub->add_option("--layers", s.layers, "Stack depth")
                     ->check(CLI::PositiveNumber)
                     ->capture_default_str();
  auto* heads = sub->add_option("--heads", s.heads, "Heads per layer")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
  auto* dm = sub->add_option("--d-model", s.d_model, "Model width")
                 ->check(CLI::PositiveNumber)
                 ->capture_default_str();
  overlay.bind("layers", layers, [&s](const json& v) {
    s.layers = static_cast<int>(config_int(v, "layers"));
  });
  overlay.bind("heads", heads, [&s](const json& v) {
    s.heads = static_cast<int>(config_int(v, "heads"));
  });
  overlay.bind("d_model", dm, [&s](const json& v) {
    s.d_model = static_cast<int>(config_int(v, "d_model"));
  });
}

void add_run_flags(CLI::App* sub, ConfigOverlay& overlay, RunOpts& r,
                   bool with_policy = true) {
  auto* seed = sub->add_option("--seed", r.seed, "Master seed")
                   ->capture_default_str();
  overlay.bind("seed", seed, [&r](const json& v) {
    r.seed = config_uint(v, "seed");
  });
  if (with_policy) {
    auto* policy =
        sub->add_option("--policy", r.policy_name,
                        "Precision policy: exact, f32, fa2-bf16")
            ->capture_default_str();
    overlay.bind("policy", policy, [&r](const json& v) {
      r.policy_name = config_string(v, "policy");
    });
    auto* threads = sub->add_option("--threads", r.threads,
                                    "Worker threads (never changes results)")
                        ->check(CLI::PositiveNumber)
                        ->capture_default_str();
    overlay.bind("threads", threads, [&r](const json& v) {
      r.threads = static_cast<int>(config_int(v, "threads"));
    });
  }
  auto* out = sub->add_option("--out", r.out_path,
                              "Output file (default: stdout)");
  overlay.bind("out", out, [&r](const json& v) {
    r.out_path = config_string(v, "out");
  });
  auto* jsonp = sub->add_option("--json", r.json_path,
                                "Also write a JSON mirror to this path");
  overlay.bind("json", jsonp, [&r](const json& v) {
    r.json_path = config_string(v, "json");
  });
  sub->add_option("--config", r.config_path,
                  "JSON config file (flags win over its keys)");
}

PrecisionPolicy resolve_policy(const std::string& name) {
  auto p = parse_policy(name);
  if (!p) {
    throw ConfigError("unknown policy \"" + name +
                      "\" (expected exact, f32, or fa2-bf16)");
  }
  return *p;
}

MaskScheme resolve_scheme(const std::string& name) {
  auto s = parse_scheme(name);
  if (!s) {
    std::string all;
    for (MaskScheme m : all_schemes()) {
      if (!all.empty()) all += ", ";
      all += to_string(m);
    }
    throw ConfigError("unknown scheme \"" + name + "\" (expected one of " +
                      all + ")");
  }
  return *s;
}

AttentionStack build_stack(const StackOpts& s, std::uint64_t seed) {
  return init_random(s.layers, s.heads, s.d_model, rng::derive_seed(seed, 0));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << text;
  if (!out) {
    throw std::runtime_error("short write: " + path);
  }
}

void maybe_write_json(const RunOpts& r, const std::string& text) {
  if (!r.json_path.empty()) {
    write_text(r.json_path, text);
  }
}

// ---------------------------------------------------------------------------
// Layout (de)serialization shared by mask/cost/pack/interleave.

json token_to_json(const Token& t) {
  return json{{"role", to_string(t.role)},
              {"doc_id", t.doc_id},
              {"chunk_id", t.chunk_id},
              {"within_doc_index", t.within_doc_index}};
}

json layout_to_json(const BatchLayout& layout) {
  json tokens = json::array();
  for (const Token& t : layout.tokens) {
    tokens.push_back(token_to_json(t));
  }
  return json{{"T", layout.size()}, {"tokens", tokens}};
}

Token token_from_json(const json& v) {
  if (!v.is_object() || !v.contains("role")) {
    throw std::runtime_error("layout token must be an object with a role");
  }
  Token t;
  const std::string role = v["role"].get<std::string>();
  if (role == "anchor") {
    t.role = TokenRole::anchor;
    t.doc_id = -1;
  } else if (role == "tag") {
    t.role = TokenRole::tag;
  } else if (role == "doc") {
    t.role = TokenRole::doc;
  } else {
    throw std::runtime_error("unknown token role: \"" + role + "\"");
  }
  if (v.contains("doc_id")) t.doc_id = v["doc_id"].get<int>();
  if (v.contains("chunk_id")) t.chunk_id = v["chunk_id"].get<int>();
  if (v.contains("within_doc_index")) {
    t.within_doc_index = v["within_doc_index"].get<int>();
  }
  for (const auto& [key, _] : v.items()) {
    if (key != "role" && key != "doc_id" && key != "chunk_id" &&
        key != "within_doc_index") {
      throw std::runtime_error("unknown token key: \"" + key + "\"");
    }
  }
  return t;
}

// A layout file either describes documents to lay out ("docs", with optional
// "seed"/"max_chunks" for the interleaved schemes) or gives the token
// sequence verbatim ("tokens", as emitted by `pack` and `interleave`).
struct LayoutFile {
  std::optional<std::vector<DocSpec>> docs;
  std::optional<BatchLayout> tokens;
  std::optional<MaskScheme> scheme;
  std::uint64_t seed = 0;
  int max_chunks = 4;
};

LayoutFile parse_layout_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open layout file: " + path);
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("layout file is not valid JSON: " +
                             std::string(e.what()));
  }
  if (!root.is_object()) {
    throw std::runtime_error("layout file must hold a JSON object");
  }
  LayoutFile out;
  for (const auto& [key, value] : root.items()) {
    if (key == "docs") {
      if (!value.is_array()) {
        throw std::runtime_error("\"docs\" must be an array");
      }
      std::vector<DocSpec> docs;
      int next_id = 0;
      for (const json& d : value) {
        if (!d.is_object() || !d.contains("len")) {
          throw std::runtime_error("each doc needs at least a \"len\"");
        }
        DocSpec spec;
        spec.id = d.contains("id") ? d["id"].get<int>() : next_id;
        spec.len = d["len"].get<int>();
        if (d.contains("domain")) spec.domain = d["domain"].get<std::string>();
        for (const auto& [dk, _] : d.items()) {
          if (dk != "id" && dk != "len" && dk != "domain") {
            throw std::runtime_error("unknown doc key: \"" + dk + "\"");
          }
        }
        next_id = spec.id + 1;
        docs.push_back(std::move(spec));
      }
      out.docs = std::move(docs);
    } else if (key == "tokens") {
      if (!value.is_array()) {
        throw std::runtime_error("\"tokens\" must be an array");
      }
      BatchLayout layout;
      for (const json& t : value) {
        layout.tokens.push_back(token_from_json(t));
      }
      out.tokens = std::move(layout);
    } else if (key == "scheme") {
      out.scheme = resolve_scheme(value.get<std::string>());
    } else if (key == "seed") {
      out.seed = config_uint(value, "seed");
    } else if (key == "max_chunks") {
      out.max_chunks = static_cast<int>(config_int(value, "max_chunks"));
    } else if (key == "T") {
      // allowed for round-tripping emitted layouts; checked against tokens
    } else {
      throw std::runtime_error("unknown layout key: \"" + key + "\"");
    }
  }
  if (out.tokens && root.contains("T") &&
      root["T"].get<int>() != out.tokens->size()) {
    throw std::runtime_error("layout \"T\" disagrees with its token count");
  }
  if (!out.docs && !out.tokens) {
    throw std::runtime_error("layout file needs \"docs\" or \"tokens\"");
  }
  if (out.docs && out.tokens) {
    throw std::runtime_error("layout file cannot mix \"docs\" and \"tokens\"");
  }
  return out;
}

BatchLayout realize_layout(const LayoutFile& file, MaskScheme scheme) {
  if (file.tokens) {
    validate_layout(*file.tokens);
    return *file.tokens;
  }
  return layout_for_scheme(*file.docs, scheme, file.seed, file.max_chunks);
}

std::vector<std::int64_t> parse_int_list_flag(const std::string& raw,
                                              const char* what) {
  std::vector<std::int64_t> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " entry: \"" + item +
                        "\"");
    }
  }
  if (out.empty()) {
    throw ConfigError(std::string(what) + " must not be empty");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweep subcommands.

const std::vector<std::int64_t> kDefaultDelta1{
    0, 2, 4, 6, 8, 10, 12, 14, 15, 17, 18, 20, 22, 50, 100, 200, 500, 1000,
    2000};
const std::vector<std::int64_t> kDefaultLengths{64,   128,  256,  512,
                                                1024, 2048, 4096, 8192};

struct SweepOpts {
  StackOpts stack;
  RunOpts run;
  int T = 1024;
  int num_sequences = 10;
  std::int64_t delta1 = 0;
  std::int64_t delta2 = 16;
  std::string delta1_list;  // comma-separated; empty = default table
  std::string lengths;      // comma-separated; empty = default table
};

SweepConfig make_sweep_config(const SweepOpts& o,
                              std::vector<std::int64_t> delta1_values) {
  SweepConfig cfg;
  cfg.delta1_values = std::move(delta1_values);
  cfg.delta2 = o.delta2;
  cfg.T = o.T;
  cfg.num_sequences = o.num_sequences;
  cfg.seed = o.run.seed;
  cfg.policy = resolve_policy(o.run.policy_name);
  cfg.threads = o.run.threads;
  return cfg;
}

void add_sweep_flags(CLI::App* sub, ConfigOverlay& overlay, SweepOpts& o,
                     bool with_T = true) {
  add_stack_flags(sub, overlay, o.stack);
  add_run_flags(sub, overlay, o.run);
  if (with_T) {
    auto* t = sub->add_option("-T,--seq-len", o.T, "Sequence length")
                  ->check(CLI::PositiveNumber)
                  ->capture_default_str();
    overlay.bind("seq_len", t, [&o](const json& v) {
      o.T = static_cast<int>(config_int(v, "seq_len"));
    });
  }
  auto* n = sub->add_option("--num-sequences", o.num_sequences,
                            "Input sequences to average over")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
  overlay.bind("num_sequences", n, [&o](const json& v) {
    o.num_sequences = static_cast<int>(config_int(v, "num_sequences"));
  });
  auto* d2 = sub->add_option("--delta2", o.delta2, "Reference shift")
                 ->capture_default_str();
  overlay.bind("delta2", d2, [&o](const json& v) {
    o.delta2 = config_int(v, "delta2");
  });
}

void run_shift_sweep(const SweepOpts& o) {
  std::vector<std::int64_t> deltas =
      o.delta1_list.empty() ? kDefaultDelta1
                            : parse_int_list_flag(o.delta1_list, "delta1 list");
  const AttentionStack stack = build_stack(o.stack, o.run.seed);
  const ShiftSweepResult result =
      shift_sweep(stack, make_sweep_config(o, std::move(deltas)));
  write_text(o.run.out_path, to_csv(result));
  maybe_write_json(o.run, to_json(result));
}

void run_per_token(const SweepOpts& o) {
  const AttentionStack stack = build_stack(o.stack, o.run.seed);
  const PerTokenResult result =
      per_token_sweep(stack, make_sweep_config(o, {o.delta1}));
  write_text(o.run.out_path, to_csv(result));
  maybe_write_json(o.run, to_json(result));
}

void run_length_sweep(const SweepOpts& o) {
  std::vector<int> lengths;
  if (o.lengths.empty()) {
    lengths.assign(kDefaultLengths.begin(), kDefaultLengths.end());
  } else {
    for (std::int64_t v : parse_int_list_flag(o.lengths, "lengths list")) {
      lengths.push_back(static_cast<int>(v));
    }
  }
  const AttentionStack stack = build_stack(o.stack, o.run.seed);
  const LengthSweepResult result =
      length_sweep(stack, make_sweep_config(o, {o.delta1}), lengths);
  write_text(o.run.out_path, to_csv(result));
  maybe_write_json(o.run, to_json(result));
}

// ---------------------------------------------------------------------------
// Mask-family subcommands.

struct MaskOpts {
  RunOpts run;
  std::string layout_path;
  std::string scheme_name;
  std::string doc_lens;
  std::uint64_t seed = 0;
  int max_chunks = 4;
  int window = 0;
  bool render = false;
};

std::vector<DocSpec> docs_from_lens(const std::string& raw) {
  std::vector<DocSpec> docs;
  int id = 0;
  for (std::int64_t v : parse_int_list_flag(raw, "doc-lens")) {
    docs.push_back(DocSpec{id++, static_cast<int>(v), ""});
  }
  return docs;
}

void run_mask(const MaskOpts& o) {
  const LayoutFile file = parse_layout_file(o.layout_path);
  std::optional<MaskScheme> scheme;
  if (!o.scheme_name.empty()) {
    scheme = resolve_scheme(o.scheme_name);
  } else if (file.scheme) {
    scheme = file.scheme;
  }
  if (!scheme) {
    throw ConfigError("no scheme: pass --scheme or put one in the layout file");
  }
  const BatchLayout layout = realize_layout(file, *scheme);
  const AttentionPlan plan = compile(layout, *scheme);
  write_text(o.run.out_path, plan_to_json(plan) + "\n");
  if (o.render) {
    std::cout << render_ascii(plan);
  }
}

void run_cost(const MaskOpts& o) {
  std::ostringstream out;
  out << "scheme,T,pairs,full_pairs,ratio\n";
  auto emit = [&](MaskScheme scheme, const BatchLayout& layout) {
    const AttentionPlan plan = compile(layout, scheme);
    char ratio[32];
    std::snprintf(ratio, sizeof(ratio), "%.17g",
                  static_cast<double>(plan.pair_count) /
                      static_cast<double>(full_causal_pair_count(plan.T)));
    out << to_string(scheme) << ',' << plan.T << ',' << plan.pair_count << ','
        << full_causal_pair_count(plan.T) << ',' << ratio << '\n';
  };
  if (!o.layout_path.empty()) {
    const LayoutFile file = parse_layout_file(o.layout_path);
    std::optional<MaskScheme> scheme;
    if (!o.scheme_name.empty()) {
      scheme = resolve_scheme(o.scheme_name);
    } else if (file.scheme) {
      scheme = file.scheme;
    }
    if (!scheme) {
      throw ConfigError(
          "no scheme: pass --scheme or put one in the layout file");
    }
    emit(*scheme, realize_layout(file, *scheme));
  } else if (!o.doc_lens.empty()) {
    const std::vector<DocSpec> docs = docs_from_lens(o.doc_lens);
    if (!o.scheme_name.empty()) {
      const MaskScheme scheme = resolve_scheme(o.scheme_name);
      emit(scheme, layout_for_scheme(docs, scheme, o.seed, o.max_chunks));
    } else {
      for (MaskScheme scheme : all_schemes()) {
        emit(scheme, layout_for_scheme(docs, scheme, o.seed, o.max_chunks));
      }
    }
  } else {
    throw ConfigError("cost needs --layout or --doc-lens");
  }
  write_text(o.run.out_path, out.str());
}

void run_pack(const MaskOpts& o) {
  if (o.doc_lens.empty()) {
    throw ConfigError("pack needs --doc-lens");
  }
  const MaskScheme scheme =
      o.scheme_name.empty() ? MaskScheme::full_causal
                            : resolve_scheme(o.scheme_name);
  std::vector<int> lengths;
  for (std::int64_t v : parse_int_list_flag(o.doc_lens, "doc-lens")) {
    lengths.push_back(static_cast<int>(v));
  }
  const std::vector<BatchLayout> windows =
      pack_documents(lengths, PackPolicy{o.window, scheme});
  json jwindows = json::array();
  for (const BatchLayout& w : windows) {
    jwindows.push_back(layout_to_json(w));
  }
  const json doc{{"window", o.window},
                 {"scheme", to_string(scheme)},
                 {"count", windows.size()},
                 {"windows", jwindows}};
  write_text(o.run.out_path, doc.dump(2) + "\n");
}

void run_interleave(const MaskOpts& o) {
  if (o.doc_lens.empty()) {
    throw ConfigError("interleave needs --doc-lens");
  }
  const BatchLayout layout = interleave_chunks(
      docs_from_lens(o.doc_lens), ChunkPolicy{o.max_chunks}, o.seed);
  write_text(o.run.out_path, layout_to_json(layout).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// selftest: built-in invariant checks, exit 0/1.

// Independent round-to-nearest-even reference: pick between the truncation
// and its pattern successor by comparing real-valued distances in double
// (exact here: both candidates and the input are binary32 values).
std::uint16_t reference_bf16(float x) {
  const std::uint32_t u = std::bit_cast<std::uint32_t>(x);
  const std::uint32_t mag = u & 0x7fffffffu;
  const std::uint16_t sign = static_cast<std::uint16_t>(u >> 31 << 15);
  if (mag >= 0x7f800000u) {  // inf/NaN: same convention as the codec
    auto hi = static_cast<std::uint16_t>(u >> 16);
    if ((u & 0x007fffffu) != 0u && (hi & 0x007fu) == 0u) hi |= 0x0040u;
    return hi;
  }
  const auto lo = static_cast<std::uint16_t>(mag >> 16);
  const auto hi = static_cast<std::uint16_t>(lo + 1);  // may be inf pattern
  const double xv = static_cast<double>(std::bit_cast<float>(mag));
  const double lov =
      static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(lo)
                                               << 16));
  double hiv;
  if ((hi & 0x7f80u) == 0x7f80u) {
    hiv = 0x1.0p128;  // value the infinity pattern stands in for
  } else {
    hiv = static_cast<double>(
        std::bit_cast<float>(static_cast<std::uint32_t>(hi) << 16));
  }
  const double dlo = xv - lov;
  const double dhi = hiv - xv;
  std::uint16_t pick;
  if (dlo < dhi) {
    pick = lo;
  } else if (dhi < dlo) {
    pick = hi;
  } else {
    pick = (lo & 1u) ? hi : lo;  // tie: even mantissa wins
  }
  return static_cast<std::uint16_t>(sign | pick);
}

bool selftest_bf16() {
  for (std::uint32_t w = 0; w < 0x10000u; ++w) {
    const Bf16Word word{static_cast<std::uint16_t>(w)};
    if (encode_bf16(decode_bf16(word)).bits != word.bits) {
      std::fprintf(stderr, "bf16 round-trip failed at 0x%04x\n", w);
      return false;
    }
  }
  std::mt19937_64 g(0xb16b00b5u);
  for (int i = 0; i < 200000; ++i) {
    const auto u = static_cast<std::uint32_t>(g());
    const float x = std::bit_cast<float>(u);
    if (encode_bf16(x).bits != reference_bf16(x)) {
      std::fprintf(stderr, "bf16 rounding mismatch at 0x%08x\n", u);
      return false;
    }
  }
  return true;
}

bool selftest_masks() {
  std::mt19937_64 g(20260814u);
  for (int iter = 0; iter < 60; ++iter) {
    const int ndocs = 1 + static_cast<int>(rng::below(g, 6));
    std::vector<DocSpec> docs;
    for (int d = 0; d < ndocs; ++d) {
      docs.push_back(DocSpec{d, 1 + static_cast<int>(rng::below(g, 9)), ""});
    }
    for (MaskScheme scheme : all_schemes()) {
      const BatchLayout layout = layout_for_scheme(docs, scheme, g(), 3);
      const AttentionPlan plan = compile(layout, scheme);
      const bool anchored = scheme_needs_anchor(scheme);
      const bool scoped = scheme != MaskScheme::full_causal;
      std::int64_t count = 0;
      for (int i = 0; i < layout.size(); ++i) {
        for (int j = 0; j < layout.size(); ++j) {
          const Token& ti = layout.tokens[static_cast<std::size_t>(i)];
          const Token& tj = layout.tokens[static_cast<std::size_t>(j)];
          bool want = j <= i;
          if (want && scoped) {
            want = ti.doc_id == tj.doc_id || (anchored && j == 0);
          }
          if (want) count++;
          if (plan.allows(i, j) != want) {
            std::fprintf(stderr,
                         "mask mismatch: scheme %s, pair (%d, %d)\n",
                         to_string(scheme), i, j);
            return false;
          }
        }
      }
      if (count != plan.pair_count) {
        std::fprintf(stderr, "pair count mismatch: scheme %s: %lld vs %lld\n",
                     to_string(scheme), static_cast<long long>(count),
                     static_cast<long long>(plan.pair_count));
        return false;
      }
      if (scheme == MaskScheme::anchor) {
        // Closed form: anchor row + per-document triangles + one anchor
        // column entry for every later token.
        std::int64_t expect = 1 + (layout.size() - 1);
        for (const DocSpec& d : docs) {
          expect += static_cast<std::int64_t>(d.len) * (d.len + 1) / 2;
        }
        if (plan.pair_count != expect) {
          std::fprintf(stderr, "anchor closed form mismatch\n");
          return false;
        }
      }
    }
  }
  return true;
}

int run_selftest() {
  int failures = 0;
  struct Section {
    const char* name;
    bool (*fn)();
  };
  const Section sections[] = {
      {"bf16 codec (exhaustive round-trip, rounding reference)", selftest_bf16},
      {"mask compiler vs enumeration reference", selftest_masks},
  };
  for (const Section& s : sections) {
    const bool ok = s.fn();
    std::printf("%-55s %s\n", s.name, ok ? "PASS" : "FAIL");
    if (!ok) failures++;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ropelab: rotary-attention precision laboratory and mask compiler"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ropelab 0.1.0");

  // Each subcommand owns its option struct and config overlay; callbacks run
  // after parsing, so config values are overlaid before any work starts.
  auto shift = std::make_shared<SweepOpts>();
  auto shift_overlay = std::make_shared<ConfigOverlay>();
  CLI::App* shift_cmd = app.add_subcommand(
      "shift-sweep", "Score difference D between shifted runs, per shift");
  add_sweep_flags(shift_cmd, *shift_overlay, *shift);
  auto* d1list =
      shift_cmd->add_option("--delta1-list", shift->delta1_list,
                            "Comma-separated shift values (default: built-in "
                            "table)");
  shift_overlay->bind("delta1_list", d1list, [shift](const json& v) {
    std::string s;
    for (std::int64_t x : config_int_list(v, "delta1_list")) {
      if (!s.empty()) s += ",";
      s += std::to_string(x);
    }
    shift->delta1_list = s;
  });
  shift_cmd->callback([shift, shift_overlay] {
    if (!shift->run.config_path.empty()) {
      shift_overlay->apply_file(shift->run.config_path);
    }
    run_shift_sweep(*shift);
  });

  auto ptok = std::make_shared<SweepOpts>();
  auto ptok_overlay = std::make_shared<ConfigOverlay>();
  CLI::App* ptok_cmd = app.add_subcommand(
      "per-token", "Per-key-column score difference for one shift pair");
  add_sweep_flags(ptok_cmd, *ptok_overlay, *ptok);
  auto* ptok_d1 = ptok_cmd->add_option("--delta1", ptok->delta1, "Shift 1")
                      ->capture_default_str();
  ptok_overlay->bind("delta1", ptok_d1, [ptok](const json& v) {
    ptok->delta1 = config_int(v, "delta1");
  });
  ptok_cmd->callback([ptok, ptok_overlay] {
    if (!ptok->run.config_path.empty()) {
      ptok_overlay->apply_file(ptok->run.config_path);
    }
    run_per_token(*ptok);
  });

  auto lsweep = std::make_shared<SweepOpts>();
  auto lsweep_overlay = std::make_shared<ConfigOverlay>();
  CLI::App* lsweep_cmd = app.add_subcommand(
      "length-sweep",
      "First-key-column logit difference across sequence lengths");
  add_sweep_flags(lsweep_cmd, *lsweep_overlay, *lsweep, /*with_T=*/false);
  auto* ls_d1 = lsweep_cmd->add_option("--delta1", lsweep->delta1, "Shift 1")
                    ->capture_default_str();
  lsweep_overlay->bind("delta1", ls_d1, [lsweep](const json& v) {
    lsweep->delta1 = config_int(v, "delta1");
  });
  auto* ls_lens = lsweep_cmd->add_option(
      "--lengths", lsweep->lengths,
      "Comma-separated sequence lengths (default: built-in table)");
  lsweep_overlay->bind("lengths", ls_lens, [lsweep](const json& v) {
    std::string s;
    for (std::int64_t x : config_int_list(v, "lengths")) {
      if (!s.empty()) s += ",";
      s += std::to_string(x);
    }
    lsweep->lengths = s;
  });
  lsweep_cmd->callback([lsweep, lsweep_overlay] {
    if (!lsweep->run.config_path.empty()) {
      lsweep_overlay->apply_file(lsweep->run.config_path);
    }
    run_length_sweep(*lsweep);
  });

  auto mask = std::make_shared<MaskOpts>();
  auto mask_overlay = std::make_shared<ConfigOverlay>();
  CLI::App* mask_cmd = app.add_subcommand(
      "mask", "Compile a layout under a scheme and emit the plan as JSON");
  add_run_flags(mask_cmd, *mask_overlay, mask->run, /*with_policy=*/false);
  mask_cmd->add_option("--layout", mask->layout_path, "Layout JSON file")
      ->required();
  auto* mask_scheme =
      mask_cmd->add_option("--scheme", mask->scheme_name,
                           "Masking scheme (overrides the layout file)");
  mask_overlay->bind("scheme", mask_scheme, [mask](const json& v) {
    mask->scheme_name = config_string(v, "scheme");
  });
  mask_cmd->add_flag("--render", mask->render,
                     "Also print an ASCII grid of the mask");
  mask_cmd->callback([mask, mask_overlay] {
    if (!mask->run.config_path.empty()) {
      mask_overlay->apply_file(mask->run.config_path);
    }
    run_mask(*mask);
  });

  auto cost = std::make_shared<MaskOpts>();
  auto cost_overlay = std::make_shared<ConfigOverlay>();
  CLI::App* cost_cmd = app.add_subcommand(
      "cost", "Attended-pair counts and cost ratios for layouts");
  add_run_flags(cost_cmd, *cost_overlay, cost->run, /*with_policy=*/false);
  cost_cmd->add_option("--layout", cost->layout_path, "Layout JSON file");
  auto* cost_scheme = cost_cmd->add_option(
      "--scheme", cost->scheme_name,
      "Only this scheme (default: every scheme, with --doc-lens)");
  cost_overlay->bind("scheme", cost_scheme, [cost](const json& v) {
    cost->scheme_name = config_string(v, "scheme");
  });
  auto* cost_lens = cost_cmd->add_option(
      "--doc-lens", cost->doc_lens, "Comma-separated document lengths");
  cost_overlay->bind("doc_lens", cost_lens, [cost](const json& v) {
    std::string s;
    for (std::int64_t x : config_int_list(v, "doc_lens")) {
      if (!s.empty()) s += ",";
      s += std::to_string(x);
    }
    cost->doc_lens = s;
  });
  auto* cost_seed2 =
      cost_cmd->add_option("--layout-seed", cost->seed,
                           "Seed for interleaved layout construction")
          ->capture_default_str();
  cost_overlay->bind("layout_seed", cost_seed2, [cost](const json& v) {
    cost->seed = config_uint(v, "layout_seed");
  });
  auto* cost_chunks = cost_cmd->add_option("--max-chunks", cost->max_chunks,
                                           "Chunk cap for interleaved layouts")
                          ->check(CLI::PositiveNumber)
                          ->capture_default_str();
  cost_overlay->bind("max_chunks", cost_chunks, [cost](const json& v) {
    cost->max_chunks = static_cast<int>(config_int(v, "max_chunks"));
  });
  cost_cmd->callback([cost, cost_overlay] {
    if (!cost->run.config_path.empty()) {
      cost_overlay->apply_file(cost->run.config_path);
    }
    run_cost(*cost);
  });

  auto pack = std::make_shared<MaskOpts>();
  auto pack_overlay = std::make_shared<ConfigOverlay>();
  CLI::App* pack_cmd = app.add_subcommand(
      "pack", "Pack documents into fixed windows and emit the layouts");
  add_run_flags(pack_cmd, *pack_overlay, pack->run, /*with_policy=*/false);
  auto* pack_lens = pack_cmd->add_option("--doc-lens", pack->doc_lens,
                                         "Comma-separated document lengths");
  pack_overlay->bind("doc_lens", pack_lens, [pack](const json& v) {
    std::string s;
    for (std::int64_t x : config_int_list(v, "doc_lens")) {
      if (!s.empty()) s += ",";
      s += std::to_string(x);
    }
    pack->doc_lens = s;
  });
  auto* pack_window =
      pack_cmd->add_option("--window", pack->window, "Window size in tokens")
          ->check(CLI::PositiveNumber);
  pack_overlay->bind("window", pack_window, [pack](const json& v) {
    pack->window = static_cast<int>(config_int(v, "window"));
  });
  auto* pack_scheme = pack_cmd->add_option(
      "--scheme", pack->scheme_name,
      "Scheme the windows are packed for (default full_causal)");
  pack_overlay->bind("scheme", pack_scheme, [pack](const json& v) {
    pack->scheme_name = config_string(v, "scheme");
  });
  pack_cmd->callback([pack, pack_overlay] {
    if (!pack->run.config_path.empty()) {
      pack_overlay->apply_file(pack->run.config_path);
    }
    if (pack->window < 1) {
      throw ConfigError("pack needs --window >= 1");
    }
    run_pack(*pack);
  });

  auto il = std::make_shared<MaskOpts>();
  auto il_overlay = std::make_shared<ConfigOverlay>();
  CLI::App* il_cmd = app.add_subcommand(
      "interleave", "Split documents into chunks and interleave them");
  add_run_flags(il_cmd, *il_overlay, il->run, /*with_policy=*/false);
  auto* il_lens = il_cmd->add_option("--doc-lens", il->doc_lens,
                                     "Comma-separated document lengths");
  il_overlay->bind("doc_lens", il_lens, [il](const json& v) {
    std::string s;
    for (std::int64_t x : config_int_list(v, "doc_lens")) {
      if (!s.empty()) s += ",";
      s += std::to_string(x);
    }
    il->doc_lens = s;
  });
  auto* il_seed = il_cmd->add_option("--layout-seed", il->seed,
                                     "Seed for chunking and interleaving")
                      ->capture_default_str();
  il_overlay->bind("layout_seed", il_seed, [il](const json& v) {
    il->seed = config_uint(v, "layout_seed");
  });
  auto* il_chunks = il_cmd->add_option("--max-chunks", il->max_chunks,
                                       "Most chunks per document")
                        ->check(CLI::PositiveNumber)
                        ->capture_default_str();
  il_overlay->bind("max_chunks", il_chunks, [il](const json& v) {
    il->max_chunks = static_cast<int>(config_int(v, "max_chunks"));
  });
  il_cmd->callback([il, il_overlay] {
    if (!il->run.config_path.empty()) {
      il_overlay->apply_file(il->run.config_path);
    }
    run_interleave(*il);
  });

  CLI::App* selftest_cmd = app.add_subcommand(
      "selftest", "Run the built-in invariant checks and report pass/fail");
  bool selftest_requested = false;
  selftest_cmd->callback([&selftest_requested] { selftest_requested = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (selftest_requested) {
    return run_selftest();
  }
  return 0;
}
