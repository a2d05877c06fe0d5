#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace torsilimit {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or schema-violating input file. `where` is the offending field path.
struct ParseError : Error {
    ParseError(const std::string& where, const std::string& what)
        : Error(where + ": " + what), where(where) {}
    std::string where;
};

struct ValidationError : Error {
    using Error::Error;
};

struct PowerFlowError : Error {
    PowerFlowError(const std::string& what, int worst_bus, double mismatch)
        : Error(what), worst_bus(worst_bus), mismatch(mismatch) {}
    int worst_bus;
    double mismatch;
};

struct SimulationError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Shaft assembly

/// One rigid rotor mass of the lumped multi-mass train.
struct RotorMass {
    std::string label;
    double inertia_H = 0.0;       ///< inertia constant, s on machine MVA base
    double self_damping = 0.0;    ///< p.u. torque per p.u. speed deviation
    bool applies_mech_torque = false;
    bool is_generator = false;
    double tm_fraction = 0.0;     ///< share of total mechanical torque (0 when !applies_mech_torque)
};

/// Massless torsional spring/damper between two adjacent masses.
struct ShaftSection {
    double stiffness_K = 0.0;     ///< p.u. torque per electrical radian
    double mutual_damping = 0.0;  ///< p.u. torque per p.u. relative speed
    std::optional<double> radius_R;      // m
    std::optional<double> length_l;      // m
    double shear_modulus_G = 83e9;       // Pa

    bool has_geometry() const { return radius_R.has_value() && length_l.has_value(); }
};

struct ShaftAssembly {
    std::string name;
    std::vector<RotorMass> masses;     // N+1
    std::vector<ShaftSection> sections;  // N
    int pole_count = 2;
    double mva_rating = 0.0;
    double sync_speed = 2.0 * kPi * 60.0;  ///< elect. rad/s

    int num_sections() const { return static_cast<int>(sections.size()); }
    int num_masses() const { return static_cast<int>(masses.size()); }
    int generator_index() const;
    double sync_freq_hz() const { return sync_speed / (2.0 * kPi); }
    /// Rated torque, N*m (mechanical base): S / (omega_s * 2/p_f).
    double torque_base() const {
        return mva_rating * 1e6 * pole_count / (2.0 * sync_speed);
    }
    void validate() const;
};

/// Converts a geometric section to p.u. stiffness per electrical radian.
/// K_si = G * (pi R^4 / 2) / l  [N*m per mech rad]; theta_mech = (2/p_f) delta_elect.
double section_stiffness_si(double radius_R, double length_l, double shear_modulus_G);
double section_stiffness_pu(double stiffness_si, double torque_base, int pole_count);
double section_stiffness_si_from_pu(double stiffness_pu, double torque_base, int pole_count);

// ---------------------------------------------------------------------------
// Material / fatigue data

/// S-N curve plus static strengths. All values share one stress unit
/// (MPa for geometric shafts, p.u. torque for per-unit benchmark shafts).
struct MaterialSpec {
    double endurance_Se = 0.0;
    double ultimate_Sut = 0.0;
    double yield_Sy = 0.0;
    std::vector<std::pair<double, double>> sn_points;  // (cycles N, amplitude S), ascending N
    std::string units = "MPa";

    void validate() const;
};

// ---------------------------------------------------------------------------
// Network case

enum class BusType { Slack, PV, PQ };

struct Bus {
    int id = 0;
    BusType type = BusType::PQ;
    double vm = 1.0;         // p.u.
    double angle_deg = 0.0;  // as stored in-file; radians via angle_rad()
    double gs = 0.0;         // p.u. shunt conductance (file value)
    double bs = 0.0;         // p.u. shunt susceptance (file value)

    double angle_rad() const { return deg2rad(angle_deg); }
};

struct Branch {
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
    double b = 0.0;    // total line charging, p.u.
    double tap = 1.0;  // off-nominal turns ratio on the from side
    bool in_service = true;
};

struct Generator {
    std::string id;
    int bus = 0;
    double p_mw = 0.0;
    double v_setpoint = 1.0;
    double mva = 0.0;          // machine base
    double armature_Ra = 0.0;  // p.u. on machine base
    double subtransient_Xd2 = 0.0;
    bool ibr = false;          ///< grid-following IBR: stays a PV bus in the IF step
    std::string shaft_file;    ///< optional, relative to the case file
    std::string material_file;

    bool is_sg() const { return !ibr; }
};

enum class LoadModel { ConstantPower, ConstantImpedance };

struct Load {
    int bus = 0;
    double p_mw = 0.0;
    double q_mvar = 0.0;
    LoadModel model = LoadModel::ConstantPower;
};

struct DataCenterSite {
    int bus = 0;
    double rating_mw = 0.0;
    bool existing = false;
};

struct NetworkCase {
    double system_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<Load> loads;
    std::vector<DataCenterSite> datacenters;

    int bus_index(int bus_id) const;  // -1 when absent
    const Bus& bus_by_id(int bus_id) const;
    int slack_index() const;
    /// Effective shunt at a bus: file shunt plus constant-impedance loads
    /// converted at nominal voltage, y = (P - jQ)/|V|^2.
    std::pair<double, double> effective_shunt(int bus_id) const;
    void validate() const;
};

// ---------------------------------------------------------------------------
// Frequency-domain primitives

/// One subsynchronous sinusoidal component of electrical power.
struct FrequencyComponent {
    double omega = 0.0;      // elect. rad/s
    double amplitude = 0.0;  // MW unless stated otherwise
    double phase = 0.0;      // rad
};

}  // namespace torsilimit
