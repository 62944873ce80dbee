const { init } = require('z3-solver');
const fs = require('fs');
(async () => {
  let input;
  if (process.argv[2] && process.argv[2] !== '-in') {
    input = fs.readFileSync(process.argv[2], 'utf8');
  } else {
    input = fs.readFileSync(0, 'utf8');
  }
  const { Z3, em } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  try {
    const out = await Z3.eval_smtlib2_string(ctx, input);
    process.stdout.write(out);
  } catch (e) {
    process.stderr.write(String(e.message || e) + '\n');
    process.exitCode = 1;
  }
  em.PThread.terminateAllThreads();
  process.exit(process.exitCode || 0);
})();
