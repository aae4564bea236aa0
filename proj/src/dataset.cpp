#include "dpi/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dpi/errors.hpp"
#include "dpi/rng.hpp"

namespace dpi {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool looks_like_sequence(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isupper(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

IngestReport ingest(const std::string& path,
                    const std::map<std::string, ProteinEmbedding>& embeddings,
                    const StubEmbedder& stub) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "smiles\tprotein\tlabel")
    throw DataError(path + ":1: expected header 'smiles<TAB>protein<TAB>label'");

  IngestReport report;
  std::size_t data_rows = 0;
  std::size_t lineno = 1;
  auto bad = [&](const std::string& reason) {
    report.bad_rows.push_back("line " + std::to_string(lineno) + ": " + reason);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++data_rows;

    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 3) {
      bad("expected 3 columns, got " + std::to_string(cols.size()));
      continue;
    }
    const std::string& smiles = cols[0];
    const std::string& protein = cols[1];
    const std::string& label_str = cols[2];

    int label;
    if (label_str == "0") label = 0;
    else if (label_str == "1") label = 1;
    else {
      bad("label must be 0 or 1, got '" + label_str + "'");
      continue;
    }

    InteractionRecord rec;
    rec.smiles = smiles;
    rec.protein = protein;
    rec.label = label;
    try {
      rec.graph = chem::featurize(chem::parse_smiles(smiles));
    } catch (const std::exception& e) {
      bad(std::string("smiles '") + smiles + "': " + e.what());
      continue;
    }

    auto it = embeddings.find(protein);
    if (it != embeddings.end()) {
      rec.protein_vec = pool(it->second);
    } else if (looks_like_sequence(protein)) {
      rec.protein_vec = pool(stub_embed(protein, stub));
    } else {
      bad("unknown protein id '" + protein + "'");
      continue;
    }
    rec.protein_vec.shape = {1, rec.protein_vec.data.size()};
    report.records.push_back(std::move(rec));
  }

  if (data_rows > 0 &&
      double(report.bad_rows.size()) > 0.01 * double(data_rows)) {
    std::ostringstream msg;
    msg << path << ": " << report.bad_rows.size() << " of " << data_rows
        << " rows failed to ingest (limit is 1%)";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, report.bad_rows.size()); ++i)
      msg << "\n  " << report.bad_rows[i];
    throw DataError(msg.str());
  }
  return report;
}

DatasetSplit split_random(std::vector<InteractionRecord> records,
                          std::uint64_t seed) {
  if (records.size() < 10)
    throw DataError("random split needs at least 10 records, got " +
                    std::to_string(records.size()));
  Rng rng(Rng::derive(seed, 0x73706c6974));  // tag: "split"
  for (std::size_t i = records.size() - 1; i > 0; --i)
    std::swap(records[i], records[rng.index(i + 1)]);

  const std::size_t n = records.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_valid = n / 10;
  DatasetSplit split;
  split.train.assign(std::make_move_iterator(records.begin()),
                     std::make_move_iterator(records.begin() + std::ptrdiff_t(n_train)));
  split.valid.assign(
      std::make_move_iterator(records.begin() + std::ptrdiff_t(n_train)),
      std::make_move_iterator(records.begin() + std::ptrdiff_t(n_train + n_valid)));
  split.test.assign(
      std::make_move_iterator(records.begin() + std::ptrdiff_t(n_train + n_valid)),
      std::make_move_iterator(records.end()));
  return split;
}

}  // namespace dpi
