import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: "./tests/globalSetup.ts",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30_000,
    hookTimeout: 60_000,
    // contract tests run in node; DOM tests opt into happy-dom per file
    environment: "node",
    environmentOptions: {
      happyDOM: { url: "http://localhost:3000" },
    },
  },
});
