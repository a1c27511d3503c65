#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wtsk/channel.hpp"
#include "wtsk/errors.hpp"

namespace wtsk {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw validation_error(path + ": " + e.what());
  }
}

double to_prob(const json& v, const std::string& what) {
  if (!v.is_number()) throw validation_error(what + " is not a number");
  return v.get<double>();
}

// Reads a nested array into a tensor with the given shape, row-major.
// A -1 in the shape is inferred from the array lengths found in the data.
Tensor read_nested(const json& node, std::vector<int> shape, const std::string& what) {
  {
    const json* probe = &node;
    for (std::size_t d = 0; d < shape.size(); ++d) {
      if (!probe->is_array() || probe->empty())
        throw validation_error(what + ": expected a nested array at depth " + std::to_string(d));
      if (shape[d] == -1) shape[d] = static_cast<int>(probe->size());
      probe = &(*probe)[0];
    }
  }
  Tensor t(shape);
  std::size_t flat = 0;
  std::function<void(const json&, std::size_t)> rec = [&](const json& j, std::size_t depth) {
    if (depth == shape.size()) {
      t[flat++] = to_prob(j, what);
      return;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != shape[depth])
      throw validation_error(what + ": expected array of length " +
                             std::to_string(shape[depth]) + " at depth " +
                             std::to_string(depth));
    for (const auto& c : j) rec(c, depth + 1);
  };
  rec(node, 0);
  return t;
}

json write_nested(const Tensor& t) {
  std::function<json(std::size_t, std::size_t, int)> rec =
      [&](std::size_t base, std::size_t stride, int axis) -> json {
    json arr = json::array();
    int dims = t.rank();
    int d = t.shape()[static_cast<std::size_t>(axis)];
    std::size_t child = stride / static_cast<std::size_t>(d);
    for (int i = 0; i < d; ++i) {
      std::size_t off = base + static_cast<std::size_t>(i) * child;
      if (axis + 1 == dims)
        arr.push_back(t[off]);
      else
        arr.push_back(rec(off, child, axis + 1));
    }
    return arr;
  };
  std::size_t total = t.size();
  return rec(0, total, 0);
}

int read_alphabet(const json& j, const char* key) {
  if (!j.contains(key)) throw validation_error(std::string("alphabets missing key ") + key);
  if (!j.at(key).is_number_integer() || j.at(key).get<int>() <= 0)
    throw validation_error(std::string("alphabet ") + key + " must be a positive integer");
  return j.at(key).get<int>();
}

}  // namespace

WiretapChannel load_channel(const std::string& path) {
  json j = parse_file(path);
  for (const char* key : {"alphabets", "state_dist", "kernel"})
    if (!j.contains(key)) throw validation_error(path + ": missing key " + key);
  WiretapChannel ch;
  ch.ns = read_alphabet(j["alphabets"], "S");
  ch.nx = read_alphabet(j["alphabets"], "X");
  ch.ny = read_alphabet(j["alphabets"], "Y");
  ch.nz = read_alphabet(j["alphabets"], "Z");
  if (!j["state_dist"].is_array() || static_cast<int>(j["state_dist"].size()) != ch.ns)
    throw validation_error(path + ": state_dist length must equal |S|");
  for (const auto& v : j["state_dist"]) ch.state_dist.push_back(to_prob(v, "state_dist entry"));
  ch.kernel = read_nested(j["kernel"], {ch.ns, ch.nx, ch.ny, ch.nz}, path + ": kernel");
  ch.validate();
  return ch;
}

void save_channel(const WiretapChannel& ch, const std::string& path) {
  ch.validate();
  json j;
  j["alphabets"] = {{"S", ch.ns}, {"X", ch.nx}, {"Y", ch.ny}, {"Z", ch.nz}};
  j["state_dist"] = ch.state_dist;
  j["kernel"] = write_nested(ch.kernel);
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out << j.dump(1) << "\n";
}

std::string aux_to_json(const AuxiliaryScheme& aux) {
  json j;
  j["mode"] = to_string(aux.mode);
  j["U"] = aux.nu;
  j["V"] = aux.nv;
  j["input_dist"] = write_nested(aux.input);
  j["selector"] = write_nested(aux.selector);
  return j.dump(1);
}

namespace {

AuxiliaryScheme aux_from_parsed(const json& j, const std::string& what) {
  for (const char* key : {"mode", "U", "V", "input_dist", "selector"})
    if (!j.contains(key)) throw validation_error(what + ": missing key " + key);
  AuxiliaryScheme aux;
  aux.mode = aux_mode_from_string(j["mode"].get<std::string>());
  aux.nu = j["U"].get<int>();
  aux.nv = j["V"].get<int>();
  if (aux.nu <= 0 || aux.nv <= 0) throw validation_error(what + ": U and V must be positive");
  // Input shape depends on mode; the S dimension is inferred from the data
  // for noncausal schemes.
  if (aux.mode == AuxMode::NonCausal) {
    if (!j["input_dist"].is_array() || j["input_dist"].empty())
      throw validation_error(what + ": input_dist must be a nonempty array");
    int ns = static_cast<int>(j["input_dist"].size());
    aux.input = read_nested(j["input_dist"], {ns, aux.nu, aux.nv}, what + ": input_dist");
    aux.selector = read_nested(j["selector"], {ns, aux.nu, aux.nv, -1}, what + ": selector");
  } else {
    aux.input = read_nested(j["input_dist"], {aux.nu, aux.nv}, what + ": input_dist");
    if (!j["selector"].is_array() || j["selector"].empty())
      throw validation_error(what + ": selector must be a nonempty array");
    int ns = static_cast<int>(j["selector"].size());
    aux.selector = read_nested(j["selector"], {ns, aux.nu, aux.nv, -1}, what + ": selector");
  }
  return aux;
}

}  // namespace

AuxiliaryScheme aux_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("aux json: ") + e.what());
  }
  return aux_from_parsed(j, "aux json");
}

AuxiliaryScheme load_aux(const std::string& path) {
  return aux_from_parsed(parse_file(path), path);
}

void save_aux(const AuxiliaryScheme& aux, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out << aux_to_json(aux) << "\n";
}

Tensor load_side_info(const std::string& path, int ns) {
  json j = parse_file(path);
  for (const char* key : {"Sa", "Sb", "Se", "kernel"})
    if (!j.contains(key)) throw validation_error(path + ": missing key " + key);
  int nsa = j["Sa"].get<int>(), nsb = j["Sb"].get<int>(), nse = j["Se"].get<int>();
  if (nsa <= 0 || nsb <= 0 || nse <= 0)
    throw validation_error(path + ": Sa, Sb, Se must be positive");
  return read_nested(j["kernel"], {ns, nsa, nsb, nse}, path + ": kernel");
}

}  // namespace wtsk
