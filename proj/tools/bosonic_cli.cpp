// bosonic: command-line front end for the Gaussian-state numerics library.
// Exit codes: 0 success, 1 I/O or parse error, 2 domain validation, 3 resource cap.

#include <bosonic/bosonic.hpp>
#include <bosonic/io.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace bosonic;

constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;

std::int64_t fock_cap_from_env() {
    const char* v = std::getenv("BOSONIC_FOCK_CAP");
    if (!v || !*v) return kDefaultFockCap;
    std::int64_t cap = 0;
    const char* end = v + std::char_traits<char>::length(v);
    auto [ptr, ec] = std::from_chars(v, end, cap);
    if (ec != std::errc() || ptr != end || cap < 1)
        throw io_error(std::string("BOSONIC_FOCK_CAP must be a positive integer, got '") + v + "'");
    return cap;
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") return kInfinity;
    double x = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || ptr != e) throw io_error("cannot parse number '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

// "start:stop:count[:log]", "a,b,c" or a single value
std::vector<double> parse_range(const std::string& range) {
    if (range.find(',') != std::string::npos) {
        std::vector<double> v;
        for (const auto& s : split(range, ',')) v.push_back(parse_double(s));
        return v;
    }
    auto parts = split(range, ':');
    if (parts.size() == 1) return {parse_double(parts[0])};
    if (parts.size() != 3 && parts.size() != 4) throw io_error("range '" + range + "' must be start:stop:count[:log]");
    const double a = parse_double(parts[0]);
    const double b = parse_double(parts[1]);
    const double cnt = parse_double(parts[2]);
    if (!(cnt >= 1.0) || cnt != std::floor(cnt)) throw io_error("range count must be a positive integer in '" + range + "'");
    const bool log_spacing = parts.size() == 4;
    if (log_spacing && parts[3] != "log") throw io_error("range spacing must be 'log' in '" + range + "'");
    if (log_spacing && !(a > 0.0 && b > 0.0)) throw io_error("log range needs positive endpoints in '" + range + "'");
    const int count = static_cast<int>(cnt);
    std::vector<double> v;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        v.push_back(log_spacing ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a));
    }
    return v;
}

std::vector<int> parse_modes(const std::string& s) {
    std::vector<int> out;
    for (const auto& p : split(s, ',')) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
        if (ec != std::errc() || ptr != p.data() + p.size()) throw io_error("cannot parse mode index '" + p + "'");
        out.push_back(v);
    }
    return out;
}

Channel make_channel(const std::string& kind, std::optional<double> lambda, std::optional<double> g) {
    if (kind == "loss") {
        if (!lambda) throw validation_error("--lambda is required for the loss channel");
        return Channel::loss(*lambda);
    }
    if (kind == "amp") {
        if (!g) throw validation_error("--g is required for the amplifier channel");
        return Channel::amplifier(*g);
    }
    throw validation_error("unknown channel '" + kind + "' (expected loss or amp)");
}

// Apply a single-mode channel to one mode of a multimode state, keeping the mode order.
GaussianState apply_channel_to_mode(const GaussianState& s, const Channel& ch, int mode) {
    detail::check_modes({mode}, s.modes());
    std::vector<int> order;
    for (int k = 0; k < s.modes(); ++k)
        if (k != mode) order.push_back(k);
    order.push_back(mode);
    GaussianState moved = reduce(s, order);
    ChannelDilation dil = ch.kind == ChannelKind::loss ? dilate_pure_loss(ch.param) : dilate_pure_amplifier(ch.param);
    GaussianState abe = stinespring_output(dil, moved);
    GaussianState ab = reduce(abe, detail::range(0, s.modes()));
    std::vector<int> back(s.modes());
    for (int k = 0; k < s.modes(); ++k) back[order[k]] = k;
    return reduce(ab, back);
}

CapacityBound evaluate_method(const std::string& method, const Channel& ch, Task task, std::int64_t n, double eps,
                              std::optional<double> ns) {
    auto loss_only = [&](const char* what) {
        if (ch.kind != ChannelKind::loss) throw validation_error(std::string(what) + " is defined for the loss channel only");
    };
    auto no_ns = [&](const char* what) {
        if (ns) throw validation_error(std::string(what) + " is an unconstrained bound; drop --Ns or use an ec_ method");
    };
    auto need_ns = [&](const char* what) {
        if (!ns) throw validation_error(std::string(what) + " requires --Ns");
    };
    if (method == "best") return best_lower_bound(ch, ns, n, eps, task);
    if (method == "upper" || method == "mmmm_upper") {
        no_ns("upper");
        return upper_bound_nshot(ch, n, eps, task);
    }
    if (method == "aep") {
        no_ns("aep");
        return ch.kind == ChannelKind::loss ? aep_lower_bound_pure_loss(ch.param, n, eps, task)
                                            : aep_lower_bound_amplifier(ch.param, n, eps, task);
    }
    if (method == "improved" || method == "improved_variance") {
        no_ns("improved_variance");
        loss_only("improved_variance");
        return improved_lower_bound_pure_loss(ch.param, n, eps, task);
    }
    if (method == "ec_aep") {
        need_ns("ec_aep");
        return ec_aep_lower_bound(ch, *ns, n, eps, task);
    }
    if (method == "ec_variance") {
        need_ns("ec_variance");
        loss_only("ec_variance");
        return ec_variance_lower_bound(ch.param, *ns, n, eps, task);
    }
    throw validation_error("unknown method '" + method +
                           "' (expected asymptotic, aep, improved_variance, ec_aep, ec_variance, best, upper)");
}

struct Options {
    // shared
    std::string out;
    // state
    double photons = 0.0;
    std::string file;
    std::string file2;
    std::string channel = "loss";
    std::optional<double> lambda;
    std::optional<double> gain;
    std::optional<int> mode;
    std::string keep;
    // tail
    std::optional<std::int64_t> cutoff;
    std::optional<double> target_eps;
    // tracedist
    double eps = 0.1;
    std::string dump_fock;
    // capacity / complexity
    std::string task = "Q2";
    std::string method = "best";
    std::int64_t n = 100;
    std::optional<double> ns;
    double k = 1.0;
    // sweep
    std::string methods = "improved_variance,aep,upper";
    std::string tasks = "Q2";
    std::string lambda_range;
    std::string g_range;
    std::string ns_range;
    std::string n_range = "100";
    std::string eps_range = "0.1";
    int jobs = 1;
};

int run_sweep(const Options& o) {
    if (o.out.empty()) throw io_error("sweep requires --out");
    std::vector<double> params;
    if (o.channel == "loss") {
        if (o.lambda_range.empty()) throw validation_error("sweep over the loss channel requires --lambda");
        params = parse_range(o.lambda_range);
    } else if (o.channel == "amp") {
        if (o.g_range.empty()) throw validation_error("sweep over the amplifier requires --g");
        params = parse_range(o.g_range);
    } else {
        throw validation_error("unknown channel '" + o.channel + "'");
    }
    std::vector<std::optional<double>> ns_values{std::nullopt};
    if (!o.ns_range.empty()) {
        ns_values.clear();
        for (double v : parse_range(o.ns_range)) ns_values.push_back(std::isinf(v) ? std::nullopt : std::optional(v));
    }
    std::vector<std::int64_t> ns_uses;
    for (double v : parse_range(o.n_range)) ns_uses.push_back(static_cast<std::int64_t>(std::llround(v)));
    const std::vector<double> epss = parse_range(o.eps_range);
    const std::vector<std::string> methods = split(o.methods, ',');
    std::vector<Task> tasks;
    for (const auto& t : split(o.tasks, ',')) tasks.push_back(parse_task(t));

    struct Tuple {
        double p;
        std::optional<double> ns;
        std::int64_t n;
        double eps;
        Task task;
        std::string method;
    };
    std::vector<Tuple> tuples;
    for (double p : params)
        for (const auto& ns : ns_values)
            for (std::int64_t n : ns_uses)
                for (double e : epss)
                    for (Task t : tasks)
                        for (const auto& m : methods) tuples.push_back({p, ns, n, e, t, m});

    std::vector<std::string> rows(tuples.size());
    auto work = [&](std::size_t i) {
        const Tuple& tp = tuples[i];
        std::string method = tp.method, direction = "lower", value = "nan", vacuous = "false", pre = "false";
        try {
            Channel ch = o.channel == "loss" ? Channel::loss(tp.p) : Channel::amplifier(tp.p);
            CapacityBound b = evaluate_method(tp.method, ch, tp.task, tp.n, tp.eps, tp.ns);
            method = to_string(b.method);
            direction = to_string(b.direction);
            value = format_double(b.value);
            vacuous = b.vacuous ? "true" : "false";
            pre = b.preconditions_met ? "true" : "false";
        } catch (const validation_error&) {
            if (tp.method == "upper") direction = "upper";
        }
        const bool loss = o.channel == "loss";
        std::ostringstream row;
        row << method << ',' << to_string(tp.task) << ',' << direction << ',' << (loss ? format_double(tp.p) : "")
            << ',' << (loss ? "" : format_double(tp.p)) << ',' << (tp.ns ? format_double(*tp.ns) : "inf") << ','
            << tp.n << ',' << format_double(tp.eps) << ',' << value << ',' << vacuous << ',' << pre << '\n';
        rows[i] = row.str();
    };

    const int jobs = std::max(1, o.jobs);
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&] {
        for (std::size_t i = next++; i < tuples.size(); i = next++) {
            try {
                work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);

    std::string csv = "method,task,direction,lambda,g,Ns,n,eps,value,vacuous,preconditions_met\n";
    for (const auto& r : rows) csv += r;
    write_text_file(o.out, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-state tail bounds, certified trace distances and n-shot capacity bounds"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI configuration file (command-line flags take precedence)");
    Options o;
    int status = 0;
    std::function<int()> action;

    // state
    auto* state = app.add_subcommand("state", "Construct, validate and transform Gaussian states");
    state->require_subcommand(1);
    auto* st_validate = state->add_subcommand("validate", "Check symmetry and the uncertainty relation");
    st_validate->add_option("file", o.file, "state JSON")->required();
    st_validate->callback([&] {
        action = [&] {
            GaussianState s = read_state_file(o.file);
            ValidityReport r = validate_state(s);
            emit(to_json(r), o.out);
            return r.valid() ? 0 : kExitValidation;
        };
    });
    auto* st_thermal = state->add_subcommand("thermal", "Thermal state with mean photon number N");
    st_thermal->add_option("--n,-N", o.photons, "mean photon number")->required();
    st_thermal->callback([&] { action = [&] { emit(to_json(thermal_state(o.photons)), o.out); return 0; }; });
    auto* st_tmsv = state->add_subcommand("tmsv", "Two-mode squeezed vacuum with N_s photons per mode");
    st_tmsv->add_option("--n,-N", o.photons, "mean photon number per mode")->required();
    st_tmsv->callback([&] { action = [&] { emit(to_json(tmsv_state(o.photons)), o.out); return 0; }; });
    auto* st_evolve = state->add_subcommand("evolve", "Send one mode through a pure loss or amplifier channel");
    st_evolve->add_option("file", o.file, "state JSON")->required();
    st_evolve->add_option("--channel", o.channel, "loss or amp")->capture_default_str();
    st_evolve->add_option("--lambda", o.lambda, "transmissivity");
    st_evolve->add_option("--g", o.gain, "gain");
    st_evolve->add_option("--mode", o.mode, "mode index (default: last mode)");
    st_evolve->callback([&] {
        action = [&] {
            GaussianState s = require_valid(read_state_file(o.file));
            Channel ch = make_channel(o.channel, o.lambda, o.gain);
            emit(to_json(apply_channel_to_mode(s, ch, o.mode.value_or(s.modes() - 1))), o.out);
            return 0;
        };
    });
    auto* st_reduce = state->add_subcommand("reduce", "Marginal on a subset of modes");
    st_reduce->add_option("file", o.file, "state JSON")->required();
    st_reduce->add_option("--keep", o.keep, "comma-separated mode indices, in output order")->required();
    st_reduce->callback([&] {
        action = [&] {
            emit(to_json(reduce(read_state_file(o.file), parse_modes(o.keep))), o.out);
            return 0;
        };
    });
    auto* st_photon = state->add_subcommand("photon", "Mean photon number");
    st_photon->add_option("file", o.file, "state JSON")->required();
    st_photon->callback([&] {
        action = [&] {
            emit(json{{"mean_photon_number", mean_photon_number(read_state_file(o.file))}}, o.out);
            return 0;
        };
    });
    for (auto* sub : {st_validate, st_thermal, st_tmsv, st_evolve, st_reduce, st_photon})
        sub->add_option("--out,-o", o.out, "output path (default: stdout)");

    // tail
    auto* tail = app.add_subcommand("tail", "Photon-number tail bounds and cutoff selection");
    tail->add_option("file", o.file, "state JSON")->required();
    auto* opt_m = tail->add_option("--M", o.cutoff, "photon cutoff M");
    auto* opt_t = tail->add_option("--target-eps", o.target_eps, "trace-distance target for cutoff selection");
    opt_m->excludes(opt_t);
    tail->add_option("--out,-o", o.out, "output path (default: stdout)");
    tail->callback([&] {
        action = [&] {
            if (!o.cutoff && !o.target_eps) throw validation_error("tail needs --M or --target-eps");
            GaussianState s = require_valid(read_state_file(o.file));
            std::int64_t m = 0;
            json j = json::object();
            if (o.target_eps) {
                m = cutoff_for_error(s, *o.target_eps);
                j["cutoff"] = m;
            } else {
                m = *o.cutoff;
            }
            j["M"] = m;
            j["mean_photon_number"] = mean_photon_number(s);
            j["closed"] = to_json(tail_bound_closed(s, m));
            j["optimized"] = to_json(tail_bound_optimized(s, m));
            j["trace_distance_bound"] = number(trace_distance_truncation_bound(s, m));
            emit(j, o.out);
            return 0;
        };
    });

    // tracedist
    auto* td = app.add_subcommand("tracedist", "Certified trace distance between two Gaussian states");
    td->add_option("file1", o.file, "first state JSON")->required();
    td->add_option("file2", o.file2, "second state JSON")->required();
    td->add_option("--eps", o.eps, "total error budget")->capture_default_str();
    td->add_option("--dump-fock", o.dump_fock, "write both truncated Fock matrices as a JSON array");
    td->add_option("--out,-o", o.out, "output path (default: stdout)");
    td->callback([&] {
        action = [&] {
            GaussianState a = read_state_file(o.file);
            GaussianState b = read_state_file(o.file2);
            const std::int64_t cap = fock_cap_from_env();
            auto t0 = std::chrono::steady_clock::now();
            TraceDistanceResult r = gaussian_trace_distance(a, b, o.eps, cap);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            json j = to_json(r);
            j["seconds"] = secs;
            emit(j, o.out);
            if (!o.dump_fock.empty()) {
                json arr = json::array({to_json(truncate_normalize(fock_matrix_elements(a, r.cutoff, cap))),
                                        to_json(truncate_normalize(fock_matrix_elements(b, r.cutoff, cap)))});
                write_text_file(o.dump_fock, arr.dump() + "\n");
            }
            return 0;
        };
    });

    // capacity
    auto* cap = app.add_subcommand("capacity", "Capacity values and n-shot bounds");
    cap->add_option("--channel", o.channel, "loss or amp")->capture_default_str();
    cap->add_option("--lambda", o.lambda, "transmissivity");
    cap->add_option("--g", o.gain, "gain");
    cap->add_option("--task", o.task, "Q, Q2 or K")->capture_default_str();
    cap->add_option("--method", o.method,
                    "asymptotic, aep, improved_variance, ec_aep, ec_variance, best, upper")
        ->capture_default_str();
    cap->add_option("--n", o.n, "channel uses")->capture_default_str();
    cap->add_option("--eps", o.eps, "error")->capture_default_str();
    cap->add_option("--Ns", o.ns, "energy constraint (mean photons per use)");
    cap->add_option("--out,-o", o.out, "output path (default: stdout)");
    cap->callback([&] {
        action = [&] {
            Channel ch = make_channel(o.channel, o.lambda, o.gain);
            Task task = parse_task(o.task);
            if (o.method == "asymptotic") {
                const double v = o.ns ? ec_asymptotic(ch, task, *o.ns) : asymptotic_capacity(ch, task);
                json params{{"channel", to_string(ch.kind)}, {ch.kind == ChannelKind::loss ? "lambda" : "g", ch.param}};
                if (o.ns) params["Ns"] = *o.ns;
                emit(json{{"value", number(v)}, {"task", to_string(task)}, {"method", "asymptotic"}, {"params", params}},
                     o.out);
                return 0;
            }
            emit(to_json(evaluate_method(o.method, ch, task, o.n, o.eps, o.ns)), o.out);
            return 0;
        };
    });

    // complexity
    auto* cx = app.add_subcommand("complexity", "Channel uses sufficient (and necessary) for k resources");
    cx->add_option("--channel", o.channel, "loss or amp")->capture_default_str();
    cx->add_option("--lambda", o.lambda, "transmissivity");
    cx->add_option("--g", o.gain, "gain");
    cx->add_option("--task", o.task, "Q, Q2 or K")->capture_default_str();
    cx->add_option("--k", o.k, "qubits, ebits or key bits")->required();
    cx->add_option("--eps", o.eps, "error")->capture_default_str();
    cx->add_option("--Ns", o.ns, "energy constraint (mean photons per use)");
    cx->add_option("--out,-o", o.out, "output path (default: stdout)");
    cx->callback([&] {
        action = [&] {
            Channel ch = make_channel(o.channel, o.lambda, o.gain);
            Task task = parse_task(o.task);
            json j{{"sufficient_n", channel_uses_sufficient(ch, o.k, o.eps, task, o.ns)}};
            const bool interior = ch.kind == ChannelKind::loss ? (ch.param > 0.0 && ch.param < 1.0) : ch.param > 1.0;
            if (task != Task::Q && interior) j["necessary_n"] = channel_uses_necessary(ch, o.k, o.eps);
            emit(j, o.out);
            return 0;
        };
    });

    // sweep
    auto* sw = app.add_subcommand("sweep", "Parameter sweep of bound families to CSV");
    sw->add_option("--channel", o.channel, "loss or amp")->capture_default_str();
    sw->add_option("--methods", o.methods, "comma-separated methods")->capture_default_str();
    sw->add_option("--tasks", o.tasks, "comma-separated tasks")->capture_default_str();
    sw->add_option("--lambda", o.lambda_range, "range start:stop:count[:log], list a,b,c or value");
    sw->add_option("--g", o.g_range, "range for the gain");
    sw->add_option("--Ns", o.ns_range, "range for the energy constraint (inf = unconstrained)");
    sw->add_option("--n", o.n_range, "range for channel uses")->capture_default_str();
    sw->add_option("--eps", o.eps_range, "range for the error")->capture_default_str();
    sw->add_option("--jobs,-j", o.jobs, "worker threads")->capture_default_str();
    sw->add_option("--out,-o", o.out, "CSV output path")->required();
    sw->callback([&] { action = [&] { return run_sweep(o); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitIo;
    }

    try {
        status = action ? action() : 0;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return status;
}
