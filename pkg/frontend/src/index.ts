export * from "./csv.js";
export * from "./svg.js";
export * from "./profiles.js";
export * from "./decay.js";
export * from "./entropy.js";
export { runCli } from "./cli.js";
