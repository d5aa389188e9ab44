#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>

namespace qrbf {

/// m scattered sites in R^d with target values and cached site norms.
///
/// Sites are stored one per row. Construction rejects exact duplicate rows and
/// non-finite coordinates or values.
class DataSet {
public:
    DataSet(Eigen::MatrixXd sites, Eigen::VectorXd values);

    [[nodiscard]] Eigen::Index size() const { return sites_.rows(); }
    [[nodiscard]] Eigen::Index dim() const { return sites_.cols(); }
    [[nodiscard]] const Eigen::MatrixXd& sites() const { return sites_; }
    [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
    [[nodiscard]] const Eigen::VectorXd& site_norms() const { return norms_; }
    [[nodiscard]] Eigen::VectorXd site(Eigen::Index j) const { return sites_.row(j).transpose(); }

    /// Smallest pairwise Euclidean distance between sites (+inf for m = 1).
    [[nodiscard]] double min_separation() const;
    /// Median over sites of the distance to the nearest other site (+inf for m = 1).
    [[nodiscard]] double median_nearest_neighbor() const;

private:
    Eigen::MatrixXd sites_;
    Eigen::VectorXd values_;
    Eigen::VectorXd norms_;
};

/// CSV with header "x1,...,xd,y" and one row per site.
[[nodiscard]] DataSet read_dataset_csv(std::istream& in);
[[nodiscard]] DataSet read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const DataSet& data);
void write_dataset_csv(const std::filesystem::path& path, const DataSet& data);

/// Query points: CSV with header "x1,...,xd" (an extra trailing "y" column is ignored).
[[nodiscard]] Eigen::MatrixXd read_points_csv(const std::filesystem::path& path);

}  // namespace qrbf
