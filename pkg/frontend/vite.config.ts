import { defineConfig } from 'vite';

export default defineConfig({
  // relative asset URLs so the bundle works mounted at any path (e.g. /ui/)
  base: './',
  build: { outDir: 'dist', emptyOutDir: true },
  server: {
    // dev-mode convenience: proxy API calls to a locally running service
    proxy: {
      '/plan': 'http://127.0.0.1:8000',
      '/select': 'http://127.0.0.1:8000',
      '/health': 'http://127.0.0.1:8000',
    },
  },
});
