/*
 * Copyright 2026 The tagmesh Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tagmesh/workload_file.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tagmesh {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw WorkloadFileError(where + ": " + what);
}

void only_keys(const ordered_json& obj, const std::string& where,
               std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) fail(where, "unknown field '" + key + "'");
  }
}

std::uint64_t get_uint(const ordered_json& obj, const std::string& where, const char* key,
                       std::optional<std::uint64_t> fallback, std::uint64_t max = UINT64_MAX) {
  if (!obj.contains(key)) {
    if (!fallback) fail(where, std::string("missing field '") + key + "'");
    return *fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) fail(where, std::string("'") + key + "' must be a non-negative integer");
  const auto n = v.get<std::uint64_t>();
  if (n > max) fail(where, std::string("'") + key + "' out of range");
  return n;
}

std::uint32_t get_u32(const ordered_json& obj, const std::string& where, const char* key,
                      std::uint32_t fallback) {
  return static_cast<std::uint32_t>(get_uint(obj, where, key, fallback, UINT32_MAX));
}

Tag get_tag(const ordered_json& obj, const std::string& where, const char* key) {
  return Tag(static_cast<std::uint8_t>(get_uint(obj, where, key, 0, 255)));
}

std::uint64_t parse_hex(const ordered_json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "data must be a hex string");
  std::string_view s = v.get_ref<const std::string&>();
  if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) fail(where, "bad hex word");
  return out;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::string get_string(const ordered_json& obj, const std::string& where, const char* key,
                       std::string fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) fail(where, std::string("'") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

Dataflow parse_dataflow(const std::string& s, const std::string& where) {
  if (s == "ws") return Dataflow::kWeightStationary;
  if (s == "os") return Dataflow::kOutputStationary;
  fail(where, "dataflow must be 'ws' or 'os'");
}

Activation parse_activation(const std::string& s, const std::string& where) {
  if (s == "none") return Activation::kNone;
  if (s == "relu") return Activation::kRelu;
  fail(where, "activation must be 'none' or 'relu'");
}

RowSource parse_source(const std::string& s, const std::string& where) {
  if (s == "zero") return RowSource::kZero;
  if (s == "spad") return RowSource::kScratchpad;
  if (s == "acc") return RowSource::kAccumulator;
  fail(where, "source must be 'zero', 'spad' or 'acc'");
}

ElemWidth parse_elem(std::uint64_t bits, const std::string& where) {
  if (bits == 8) return ElemWidth::k8;
  if (bits == 32) return ElemWidth::k32;
  fail(where, "elem must be 8 or 32");
}

const char* dataflow_name(Dataflow d) { return d == Dataflow::kWeightStationary ? "ws" : "os"; }
const char* activation_name(Activation a) { return a == Activation::kRelu ? "relu" : "none"; }
const char* source_name(RowSource s) {
  switch (s) {
    case RowSource::kZero: return "zero";
    case RowSource::kScratchpad: return "spad";
    case RowSource::kAccumulator: return "acc";
  }
  return "?";
}

std::vector<MemoryRecord> parse_records(const ordered_json& arr, const std::string& where,
                                        std::uint64_t words) {
  if (!arr.is_array()) fail(where, "expected a list");
  std::vector<MemoryRecord> out;
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const auto& rec = arr[i];
    only_keys(rec, w, {"addr", "data", "tag"});
    MemoryRecord r;
    r.addr = get_uint(rec, w, "addr", std::nullopt);
    if (r.addr >= words) fail(w, "addr beyond memory_words");
    if (!seen.insert(r.addr).second) fail(w, "duplicate addr");
    r.data = rec.contains("data") ? parse_hex(rec.at("data"), w) : 0;
    r.tag = get_tag(rec, w, "tag");
    out.push_back(r);
  }
  return out;
}

Command parse_command(const ordered_json& c, const std::string& where) {
  if (!c.is_object() || !c.contains("op")) fail(where, "command needs an 'op'");
  const std::string op = get_string(c, where, "op", "");
  const auto kind = parse_command_kind(op);
  if (!kind) fail(where, "unknown op '" + op + "'");

  Command cmd;
  const bool raw = c.contains("rs1") || c.contains("rs2");
  if (raw) {
    only_keys(c, where, {"op", "rs1", "rs2", "inst_tag", "rs1_tag", "rs2_tag"});
    cmd.kind = *kind;
    cmd.rs1.data = c.contains("rs1") ? parse_hex(c.at("rs1"), where) : 0;
    cmd.rs2.data = c.contains("rs2") ? parse_hex(c.at("rs2"), where) : 0;
  } else {
    try {
      switch (*kind) {
        case CommandKind::kConfig: {
          only_keys(c, where, {"op", "dataflow", "activation", "k", "n", "m", "inst_tag",
                               "rs1_tag", "rs2_tag"});
          ConfigArgs a;
          a.dataflow = parse_dataflow(get_string(c, where, "dataflow", "ws"), where);
          a.activation = parse_activation(get_string(c, where, "activation", "none"), where);
          a.k = get_u32(c, where, "k", 0);
          a.n = get_u32(c, where, "n", 0);
          a.m = get_u32(c, where, "m", 0);
          cmd = encode(a);
          break;
        }
        case CommandKind::kMvin: {
          only_keys(c, where, {"op", "addr", "stride", "row", "rows", "col_offset", "cols",
                               "elem", "inst_tag", "rs1_tag", "rs2_tag"});
          MoveArgs a;
          a.addr = get_u32(c, where, "addr", 0);
          a.stride = get_u32(c, where, "stride", 0);
          a.row = get_u32(c, where, "row", 0);
          a.rows = get_u32(c, where, "rows", 1);
          a.col_offset = get_u32(c, where, "col_offset", 0);
          a.cols = get_u32(c, where, "cols", 0);
          a.elem = parse_elem(get_uint(c, where, "elem", 8), where);
          cmd = encode_mvin(a);
          break;
        }
        case CommandKind::kMvout: {
          only_keys(c, where, {"op", "addr", "stride", "acc_row", "rows", "elem", "inst_tag",
                               "rs1_tag", "rs2_tag"});
          MoveArgs a;
          a.addr = get_u32(c, where, "addr", 0);
          a.stride = get_u32(c, where, "stride", 0);
          a.row = get_u32(c, where, "acc_row", 0);
          a.rows = get_u32(c, where, "rows", 1);
          a.elem = parse_elem(get_uint(c, where, "elem", 32), where);
          cmd = encode_mvout(a);
          break;
        }
        case CommandKind::kPreload: {
          only_keys(c, where, {"op", "row", "source", "inst_tag", "rs1_tag", "rs2_tag"});
          PreloadArgs a;
          a.row = get_u32(c, where, "row", 0);
          a.source = parse_source(get_string(c, where, "source", "spad"), where);
          cmd = encode(a);
          break;
        }
        case CommandKind::kCompute: {
          only_keys(c, where, {"op", "a_row", "d_row", "d_source", "dest", "accumulate", "b_row",
                               "inst_tag", "rs1_tag", "rs2_tag"});
          ComputeArgs a;
          a.a_row = get_u32(c, where, "a_row", 0);
          a.d_row = get_u32(c, where, "d_row", 0);
          a.d_source = parse_source(get_string(c, where, "d_source", "zero"), where);
          a.dest = get_u32(c, where, "dest", 0);
          if (c.contains("accumulate")) {
            if (!c.at("accumulate").is_boolean()) fail(where, "'accumulate' must be a boolean");
            a.accumulate = c.at("accumulate").get<bool>();
          }
          a.b_row = get_u32(c, where, "b_row", 0);
          cmd = encode(a);
          break;
        }
      }
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
  }
  cmd.inst_tag = get_tag(c, where, "inst_tag");
  cmd.rs1.tag = get_tag(c, where, "rs1_tag");
  cmd.rs2.tag = get_tag(c, where, "rs2_tag");
  return cmd;
}

ordered_json command_json(const Command& cmd) {
  ordered_json j;
  j["op"] = std::string(to_string(cmd.kind));
  try {
    switch (cmd.kind) {
      case CommandKind::kConfig: {
        const auto a = decode_config(cmd);
        j["dataflow"] = dataflow_name(a.dataflow);
        j["activation"] = activation_name(a.activation);
        j["k"] = a.k;
        j["n"] = a.n;
        j["m"] = a.m;
        break;
      }
      case CommandKind::kMvin: {
        const auto a = decode_move(cmd);
        j["addr"] = a.addr;
        j["stride"] = a.stride;
        j["row"] = a.row;
        j["rows"] = a.rows;
        if (a.col_offset != 0) j["col_offset"] = a.col_offset;
        if (a.cols != 0) j["cols"] = a.cols;
        j["elem"] = bits(a.elem);
        break;
      }
      case CommandKind::kMvout: {
        const auto a = decode_move(cmd);
        j["addr"] = a.addr;
        j["stride"] = a.stride;
        j["acc_row"] = a.row;
        j["rows"] = a.rows;
        j["elem"] = bits(a.elem);
        break;
      }
      case CommandKind::kPreload: {
        const auto a = decode_preload(cmd);
        j["row"] = a.row;
        j["source"] = source_name(a.source);
        break;
      }
      case CommandKind::kCompute: {
        const auto a = decode_compute(cmd);
        j["a_row"] = a.a_row;
        j["d_row"] = a.d_row;
        j["d_source"] = source_name(a.d_source);
        j["dest"] = a.dest;
        j["accumulate"] = a.accumulate;
        j["b_row"] = a.b_row;
        break;
      }
    }
    // Named fields must reproduce the exact encoding, else fall back to raw.
    if (parse_command(j, "dump") != Command{cmd.kind, kPublic, {cmd.rs1.data, kPublic},
                                            {cmd.rs2.data, kPublic}}) {
      throw std::invalid_argument("not canonical");
    }
  } catch (const std::exception&) {
    j = ordered_json::object();
    j["op"] = std::string(to_string(cmd.kind));
    j["rs1"] = hex(cmd.rs1.data);
    j["rs2"] = hex(cmd.rs2.data);
  }
  if (cmd.inst_tag.is_blinded()) j["inst_tag"] = cmd.inst_tag.value;
  if (cmd.rs1.tag.is_blinded()) j["rs1_tag"] = cmd.rs1.tag.value;
  if (cmd.rs2.tag.is_blinded()) j["rs2_tag"] = cmd.rs2.tag.value;
  return j;
}

ordered_json records_json(const std::vector<MemoryRecord>& recs) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : recs) {
    arr.push_back({{"addr", r.addr}, {"data", hex(r.data)}, {"tag", r.tag.value}});
  }
  return arr;
}

}  // namespace

TaggedMemory WorkloadFile::initial_memory() const {
  TaggedMemory mem(memory_words);
  for (const auto& r : memory) mem.poke(r.addr, TaggedWord{r.data, r.tag});
  return mem;
}

WorkloadFile parse_workload(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw WorkloadFileError(std::string("syntax: ") + e.what());
  }
  only_keys(root, "workload", {"name", "config", "memory", "commands", "expected"});
  if (!root.contains("config")) fail("workload", "missing field 'config'");
  if (!root.contains("commands")) fail("workload", "missing field 'commands'");

  WorkloadFile w;
  w.name = get_string(root, "workload", "name", "");

  const auto& cfg = root.at("config");
  only_keys(cfg, "config", {"mesh_rows", "mesh_cols", "dataflow", "activation", "spad_banks",
                            "spad_depth", "acc_depth", "memory_words"});
  const auto rows = get_uint(cfg, "config", "mesh_rows", std::nullopt);
  const auto cols = get_uint(cfg, "config", "mesh_cols", rows);
  if (rows != cols) fail("config", "the controller drives square meshes only");
  w.config.dim = rows;
  w.config.dataflow = parse_dataflow(get_string(cfg, "config", "dataflow", "ws"), "config");
  w.config.activation = parse_activation(get_string(cfg, "config", "activation", "none"), "config");
  w.config.spad_banks = get_uint(cfg, "config", "spad_banks", 4);
  w.config.spad_depth = get_uint(cfg, "config", "spad_depth", 128);
  w.config.acc_depth = get_uint(cfg, "config", "acc_depth", 128);
  w.memory_words = get_uint(cfg, "config", "memory_words", std::nullopt);
  try {
    w.config.validate();
  } catch (const std::invalid_argument& e) {
    fail("config", e.what());
  }

  if (root.contains("memory")) w.memory = parse_records(root.at("memory"), "memory", w.memory_words);
  const auto& cmds = root.at("commands");
  if (!cmds.is_array()) fail("commands", "expected a list");
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    w.commands.push_back(parse_command(cmds[i], "commands[" + std::to_string(i) + "]"));
  }
  if (root.contains("expected")) {
    w.expected = parse_records(root.at("expected"), "expected", w.memory_words);
  }
  return w;
}

WorkloadFile load_workload(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WorkloadFileError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_workload(ss.str());
}

std::string dump_workload(const WorkloadFile& w) {
  ordered_json root;
  root["name"] = w.name;
  root["config"] = {
      {"mesh_rows", w.config.dim},
      {"mesh_cols", w.config.dim},
      {"dataflow", dataflow_name(w.config.dataflow)},
      {"activation", activation_name(w.config.activation)},
      {"spad_banks", w.config.spad_banks},
      {"spad_depth", w.config.spad_depth},
      {"acc_depth", w.config.acc_depth},
      {"memory_words", w.memory_words},
  };
  root["memory"] = records_json(w.memory);
  ordered_json cmds = ordered_json::array();
  for (const auto& c : w.commands) cmds.push_back(command_json(c));
  root["commands"] = std::move(cmds);
  if (!w.expected.empty()) root["expected"] = records_json(w.expected);

  // One record per line keeps files diffable without bloating them.
  std::ostringstream os;
  os << "{\n";
  bool first_key = true;
  for (const auto& [key, value] : root.items()) {
    os << (first_key ? "" : ",\n") << "  " << ordered_json(key).dump() << ": ";
    first_key = false;
    if (value.is_array()) {
      os << '[';
      for (std::size_t i = 0; i < value.size(); ++i) {
        os << (i == 0 ? "\n    " : ",\n    ") << value[i].dump();
      }
      os << (value.empty() ? "]" : "\n  ]");
    } else {
      os << value.dump();
    }
  }
  os << "\n}\n";
  return os.str();
}

WorkloadFile to_file(const Workload& w) {
  WorkloadFile f;
  f.name = w.name;
  f.config = w.config;
  f.memory_words = w.memory.size();
  for (std::uint64_t a = 0; a < w.memory.size(); ++a) {
    const auto& word = w.memory.at(a);
    if (word.data != 0 || word.tag.is_blinded()) f.memory.push_back({a, word.data, word.tag});
  }
  f.commands = w.commands;
  for (const auto& e : w.expected) {
    const auto& h = e.where;
    for (std::size_t r = 0; r < h.rows; ++r) {
      std::vector<std::int32_t> row(h.padded_cols, 0);
      for (std::size_t c = 0; c < h.cols; ++c) row[c] = e.values.at(r, c);
      const auto words = pack_elems(row, h.elem);
      for (std::size_t i = 0; i < words.size(); ++i) {
        f.expected.push_back({h.addr + r * h.stride + i, words[i], e.row_tags[r]});
      }
    }
  }
  return f;
}

std::vector<std::string> compare_expected(const WorkloadFile& w, const TaggedMemory& mem) {
  std::vector<std::string> out;
  for (const auto& r : w.expected) {
    const auto& got = mem.at(r.addr);
    if (got.data != r.data || got.tag != r.tag) {
      out.push_back("word " + std::to_string(r.addr) + ": expected " + hex(r.data) + " tag " +
                    std::to_string(r.tag.value) + ", got " + hex(got.data) + " tag " +
                    std::to_string(got.tag.value));
    }
  }
  return out;
}

}  // namespace tagmesh
