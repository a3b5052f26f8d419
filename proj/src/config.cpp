#include "delayev/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace delayev {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object())
        throw ConfigError("config: '" + ctx + "' must be a JSON object");
}

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' in " + ctx);
}

double num(const json& obj, const std::string& ctx, const char* key) {
    if (!obj.contains(key))
        throw ConfigError("config: missing '" + std::string(key) + "' in " + ctx);
    if (!obj[key].is_number())
        throw ConfigError("config: '" + std::string(key) + "' in " + ctx + " must be a number");
    return obj[key].get<double>();
}

double num_or(const json& obj, const std::string& ctx, const char* key, double fb) {
    return obj.contains(key) ? num(obj, ctx, key) : fb;
}

int int_or(const json& obj, const std::string& ctx, const char* key, int fb) {
    if (!obj.contains(key))
        return fb;
    if (!obj[key].is_number_integer())
        throw ConfigError("config: '" + std::string(key) + "' in " + ctx + " must be an integer");
    return obj[key].get<int>();
}

std::vector<double> num_array(const json& obj, const std::string& ctx, const char* key) {
    if (!obj.contains(key) || !obj[key].is_array())
        throw ConfigError("config: '" + std::string(key) + "' in " + ctx + " must be an array");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number())
            throw ConfigError("config: non-numeric entry in '" + std::string(key) + "' of " + ctx);
        out.push_back(v.get<double>());
    }
    return out;
}

CatalogEntry parse_entry(const json& j, const std::string& ctx) {
    require_object(j, ctx);
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("config: '" + ctx + "' needs a string 'kind'");
    CatalogEntry e;
    e.kind = j["kind"].get<std::string>();
    if (e.kind == "constant") {
        check_keys(j, ctx, {"kind", "value"});
        e.params["value"] = num(j, ctx, "value");
    } else if (e.kind == "linear") {
        check_keys(j, ctx, {"kind", "value", "slope"});
        e.params["value"] = num(j, ctx, "value");
        e.params["slope"] = num(j, ctx, "slope");
    } else if (e.kind == "sinusoidal") {
        check_keys(j, ctx, {"kind", "base", "amp", "freq", "phase"});
        e.params["base"] = num(j, ctx, "base");
        e.params["amp"] = num(j, ctx, "amp");
        e.params["freq"] = num(j, ctx, "freq");
        if (j.contains("phase"))
            e.params["phase"] = num(j, ctx, "phase");
    } else if (e.kind == "exp_decay_kernel") {
        check_keys(j, ctx, {"kind", "k0", "lambda"});
        e.params["k0"] = num(j, ctx, "k0");
        e.params["lambda"] = num(j, ctx, "lambda");
    } else if (e.kind == "poly_decay_kernel") {
        check_keys(j, ctx, {"kind", "k0", "p"});
        e.params["k0"] = num(j, ctx, "k0");
        e.params["p"] = num(j, ctx, "p");
    } else if (e.kind == "piecewise_table") {
        check_keys(j, ctx, {"kind", "times", "values"});
        e.times = num_array(j, ctx, "times");
        e.values = num_array(j, ctx, "values");
    } else {
        throw ConfigError("config: unknown catalog kind '" + e.kind + "' in " + ctx);
    }
    return e;
}

RegionSpec parse_region(const json& j, const std::string& ctx) {
    require_object(j, ctx);
    check_keys(j, ctx, {"lo", "hi"});
    return RegionSpec{num(j, ctx, "lo"), num(j, ctx, "hi")};
}

std::vector<ChannelConfig> parse_channels(const json& doc) {
    std::vector<ChannelConfig> out;
    if (!doc.contains("channels"))
        return out;
    if (!doc["channels"].is_array())
        throw ConfigError("config: 'channels' must be an array");
    int idx = 0;
    for (const auto& jc : doc["channels"]) {
        std::ostringstream ctx;
        ctx << "channels[" << idx << "]";
        require_object(jc, ctx.str());
        check_keys(jc, ctx.str(),
                   {"delay", "c", "slope_min", "kernel", "history", "b", "region"});
        ChannelConfig cc;
        if (!jc.contains("delay"))
            throw ConfigError("config: " + ctx.str() + " needs a 'delay' entry");
        cc.delay = parse_entry(jc["delay"], ctx.str() + ".delay");
        cc.c = num_or(jc, ctx.str(), "c", 0.0);
        if (jc.contains("slope_min"))
            cc.slope_min = num(jc, ctx.str(), "slope_min");
        if (!jc.contains("kernel"))
            throw ConfigError("config: " + ctx.str() + " needs a 'kernel' entry");
        cc.kernel = parse_entry(jc["kernel"], ctx.str() + ".kernel");
        if (!jc.contains("history"))
            throw ConfigError("config: " + ctx.str() + " needs a 'history' entry");
        cc.history = parse_entry(jc["history"], ctx.str() + ".history");
        if (jc.contains("b"))
            cc.b = num(jc, ctx.str(), "b");
        if (jc.contains("region"))
            cc.region = parse_region(jc["region"], ctx.str() + ".region");
        out.push_back(std::move(cc));
        ++idx;
    }
    return out;
}

NonlinearityConfig parse_nonlinearity(const json& jm, const std::string& ctx) {
    NonlinearityConfig f;
    if (!jm.contains("f"))
        return f;
    const json& jf = jm["f"];
    require_object(jf, ctx + ".f");
    check_keys(jf, ctx + ".f", {"kind", "scale"});
    if (jf.contains("kind")) {
        if (!jf["kind"].is_string())
            throw ConfigError("config: " + ctx + ".f.kind must be a string");
        f.kind = jf["kind"].get<std::string>();
    }
    f.scale = num_or(jf, ctx + ".f", "scale", 0.0);
    return f;
}

WaveInit parse_init(const json& jm, const std::string& ctx) {
    WaveInit init;
    if (!jm.contains("init"))
        return init;
    const json& ji = jm["init"];
    require_object(ji, ctx + ".init");
    check_keys(ji, ctx + ".init",
               {"u_amp", "u_mode", "v_amp", "v_mode", "history_rate"});
    init.u_amp = num_or(ji, ctx, "u_amp", 1.0);
    init.u_mode = int_or(ji, ctx, "u_mode", 1);
    init.v_amp = num_or(ji, ctx, "v_amp", 0.0);
    init.v_mode = int_or(ji, ctx, "v_mode", 1);
    init.history_rate = num_or(ji, ctx, "history_rate", 0.0);
    return init;
}

MemoryKernel parse_memory_kernel(const json& jm, const std::string& ctx) {
    if (!jm.contains("kernel"))
        throw ConfigError("config: " + ctx + " needs a memory 'kernel'");
    const json& jk = jm["kernel"];
    require_object(jk, ctx + ".kernel");
    check_keys(jk, ctx + ".kernel", {"mu0", "delta"});
    MemoryKernel mk;
    mk.mu0 = num(jk, ctx + ".kernel", "mu0");
    mk.delta = num(jk, ctx + ".kernel", "delta");
    return mk;
}

} // namespace

RunConfig parse_config(const nlohmann::json& doc) {
    require_object(doc, "document root");
    check_keys(doc, "document root",
               {"seed", "model", "channels", "solver", "certificate", "outputs"});
    RunConfig cfg;
    cfg.raw = doc;
    cfg.seed = static_cast<unsigned>(int_or(doc, "document root", "seed", 0));

    if (!doc.contains("model"))
        throw ConfigError("config: missing 'model' block");
    const json& jm = doc["model"];
    require_object(jm, "model");
    if (!jm.contains("type") || !jm["type"].is_string())
        throw ConfigError("config: model needs a string 'type'");
    cfg.model_type = jm["type"].get<std::string>();

    auto channels = parse_channels(doc);

    // Certificate block: optional (M, omega) override + growth-grid +
    // quadrature tolerances + family truncation budget.
    CertificateConfig cert;
    double eps_tail = 0.0;
    std::optional<double> tail_sup;
    if (doc.contains("certificate")) {
        const json& jc = doc["certificate"];
        require_object(jc, "certificate");
        check_keys(jc, "certificate",
                   {"M", "omega", "horizon", "n_samples", "quad", "eps_tail", "tail_sup"});
        if (jc.contains("M") != jc.contains("omega"))
            throw ConfigError("config: certificate override needs both M and omega");
        if (jc.contains("M"))
            cert.supplied = std::make_pair(num(jc, "certificate", "M"),
                                           num(jc, "certificate", "omega"));
        cert.horizon = num_or(jc, "certificate", "horizon", 10.0);
        cert.n_samples = int_or(jc, "certificate", "n_samples", 32);
        eps_tail = num_or(jc, "certificate", "eps_tail", 0.0);
        if (jc.contains("tail_sup"))
            tail_sup = num(jc, "certificate", "tail_sup");
        if (jc.contains("quad")) {
            const json& jq = jc["quad"];
            require_object(jq, "certificate.quad");
            check_keys(jq, "certificate.quad",
                       {"abs_tol", "rel_tol", "max_panels", "tail_eps", "cutoff"});
            cfg.quad.abs_tol = num_or(jq, "quad", "abs_tol", cfg.quad.abs_tol);
            cfg.quad.rel_tol = num_or(jq, "quad", "rel_tol", cfg.quad.rel_tol);
            cfg.quad.max_panels = int_or(jq, "quad", "max_panels", cfg.quad.max_panels);
            cfg.quad.tail_eps = num_or(jq, "quad", "tail_eps", cfg.quad.tail_eps);
            if (jq.contains("cutoff"))
                cfg.quad.cutoff_override = num(jq, "quad", "cutoff");
        }
    }

    if (doc.contains("solver")) {
        const json& js = doc["solver"];
        require_object(js, "solver");
        check_keys(js, "solver", {"T", "dt", "tol", "max_iter"});
        cfg.solver.horizon = num_or(js, "solver", "T", cfg.solver.horizon);
        cfg.solver.dt = num_or(js, "solver", "dt", cfg.solver.dt);
        cfg.solver.tol = num_or(js, "solver", "tol", cfg.solver.tol);
        cfg.solver.max_iter = int_or(js, "solver", "max_iter", cfg.solver.max_iter);
    }

    if (doc.contains("outputs")) {
        const json& jo = doc["outputs"];
        require_object(jo, "outputs");
        check_keys(jo, "outputs", {"dir"});
        if (jo.contains("dir")) {
            if (!jo["dir"].is_string())
                throw ConfigError("config: outputs.dir must be a string");
            cfg.output_dir = jo["dir"].get<std::string>();
        }
    }

    if (cfg.model_type == "scalar") {
        check_keys(jm, "model", {"type", "a", "u0", "f"});
        cfg.scalar.a = num_or(jm, "model", "a", 1.0);
        cfg.scalar.u0 = num_or(jm, "model", "u0", 1.0);
        cfg.scalar.channels = channels;
        cfg.scalar.f = parse_nonlinearity(jm, "model");
        cfg.scalar.cert = cert;
        cfg.scalar.eps_tail = eps_tail;
        cfg.scalar.tail_sup = tail_sup;
    } else if (cfg.model_type == "damped_wave") {
        check_keys(jm, "model", {"type", "n_x", "a", "damping", "init", "f"});
        cfg.damped_wave.n_x = int_or(jm, "model", "n_x", 20);
        cfg.damped_wave.a = num_or(jm, "model", "a", 1.0);
        if (jm.contains("damping"))
            cfg.damped_wave.damping = parse_region(jm["damping"], "model.damping");
        cfg.damped_wave.init = parse_init(jm, "model");
        cfg.damped_wave.channels = channels;
        cfg.damped_wave.f = parse_nonlinearity(jm, "model");
        cfg.damped_wave.cert = cert;
        cfg.damped_wave.eps_tail = eps_tail;
        cfg.damped_wave.tail_sup = tail_sup;
    } else if (cfg.model_type == "wave_memory" || cfg.model_type == "plate") {
        check_keys(jm, "model", {"type", "n_x", "n_s", "s_max", "kernel", "init", "f"});
        WaveMemoryParams p;
        p.n_x = int_or(jm, "model", "n_x", 20);
        p.n_s = int_or(jm, "model", "n_s", 16);
        p.s_max = num_or(jm, "model", "s_max", 23.0);
        p.kernel = parse_memory_kernel(jm, "model");
        p.init = parse_init(jm, "model");
        p.channels = channels;
        p.f = parse_nonlinearity(jm, "model");
        p.cert = cert;
        p.eps_tail = eps_tail;
        p.tail_sup = tail_sup;
        if (cfg.model_type == "wave_memory")
            cfg.wave_memory = p;
        else
            cfg.plate = p;
    } else {
        throw ConfigError("config: unknown model type '" + cfg.model_type + "'");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(doc);
}

BuiltModel build_from_config(const RunConfig& cfg) {
    if (cfg.model_type == "scalar")
        return build_scalar(cfg.scalar);
    if (cfg.model_type == "damped_wave")
        return build_damped_wave(cfg.damped_wave);
    if (cfg.model_type == "wave_memory")
        return build_wave_memory(cfg.wave_memory);
    if (cfg.model_type == "plate")
        return build_plate(cfg.plate);
    throw ConfigError("config: unknown model type '" + cfg.model_type + "'");
}

} // namespace delayev
