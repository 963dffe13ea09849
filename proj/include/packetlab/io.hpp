#ifndef PACKETLAB_IO_HPP
#define PACKETLAB_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "packetlab/basis_select.hpp"
#include "packetlab/filterbank.hpp"
#include "packetlab/frame_analysis.hpp"
#include "packetlab/lattice.hpp"
#include "packetlab/packet_transform.hpp"

namespace packetlab::io {

using nlohmann::json;

inline constexpr std::string_view kFilterBankSchema = "packetlab-filterbank-v1";
inline constexpr std::string_view kGridSchema = "packetlab-grid-v1";
inline constexpr std::string_view kTreeSchema = "packetlab-tree-v1";
inline constexpr std::string_view kBasisSchema = "packetlab-basis-v1";
inline constexpr std::string_view kDigitsSchema = "packetlab-digits-v1";
inline constexpr std::string_view kSplittingSchema = "packetlab-splitting-v1";
inline constexpr std::string_view kFrameSchema = "packetlab-frame-v1";
inline constexpr std::string_view kMatrixSchema = "packetlab-matrix-v1";

/// binary64 hex-float text ("%a"), exact on round trip.
std::string hex_double(double v);
/// Accepts a JSON number or a string holding a decimal or hex float.
double parse_double(const json& v);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

json complex_to_json(Complex c);
Complex complex_from_json(const json& j);

json int_vec_to_json(const IntVec& v);
IntVec int_vec_from_json(const json& j, int dim);

std::vector<std::vector<std::int64_t>> matrix_rows_from_json(const json& j);
/// Parses "1,1;1,-1" (rows separated by ';') or JSON rows "[[1,1],[1,-1]]".
std::vector<std::vector<std::int64_t>> matrix_rows_from_text(std::string_view text);

json digits_to_json(const DilationMatrix& m, const DigitSet& ka, const DigitSet& kb);

json filterbank_to_json(const FilterBank& fb);
FilterBank filterbank_from_json(const json& doc);

enum class GridEncoding { Base64, Json };

json grid_to_json(const CoefficientGrid& grid, GridEncoding encoding = GridEncoding::Base64);
CoefficientGrid grid_from_json(const json& doc);

json tree_to_json(const PacketTree& tree, GridEncoding encoding = GridEncoding::Base64);
PacketTree tree_from_json(const json& doc, const FilterBank& bank);

json basis_to_json(const BasisSpec& spec);
BasisSpec basis_from_json(const json& doc);
json partition_report_to_json(const PartitionReport& report);

json splitting_report_to_json(const SplittingReport& report);
json frame_report_to_json(const FrameReport& report);

json complex_matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd complex_matrix_from_json(const json& doc);

json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with sorted keys and a trailing newline.
std::string dump(const json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace packetlab::io

#endif  // PACKETLAB_IO_HPP
