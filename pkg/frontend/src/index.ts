export * from "./types.js";
export * from "./client.js";
export * from "./matrix.js";
export * from "./step.js";
export * from "./editor.js";
