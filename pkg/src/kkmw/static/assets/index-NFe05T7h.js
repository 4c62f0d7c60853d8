var g=Object.defineProperty;var y=(t,e,n)=>e in t?g(t,e,{enumerable:!0,configurable:!0,writable:!0,value:n}):t[e]=n;var l=(t,e,n)=>y(t,typeof e!="symbol"?e+"":e,n);(function(){const e=document.createElement("link").relList;if(e&&e.supports&&e.supports("modulepreload"))return;for(const s of document.querySelectorAll('link[rel="modulepreload"]'))i(s);new MutationObserver(s=>{for(const r of s)if(r.type==="childList")for(const a of r.addedNodes)a.tagName==="LINK"&&a.rel==="modulepreload"&&i(a)}).observe(document,{childList:!0,subtree:!0});function n(s){const r={};return s.integrity&&(r.integrity=s.integrity),s.referrerPolicy&&(r.referrerPolicy=s.referrerPolicy),s.crossOrigin==="use-credentials"?r.credentials="include":s.crossOrigin==="anonymous"?r.credentials="omit":r.credentials="same-origin",r}function i(s){if(s.ep)return;s.ep=!0;const r=n(s);fetch(s.href,r)}})();class f extends Error{constructor(e,n){super(`${e}: ${n}`),this.status=e,this.detail=n}}async function p(t,e){const n=await fetch(t,{headers:{"content-type":"application/json"},...e});if(!n.ok){let i=n.statusText;try{const s=await n.json();i=typeof s.detail=="string"?s.detail:JSON.stringify(s.detail)}catch{}throw new f(n.status,i)}return n.json()}function w(t,e,n={}){return p("/api/v1/sessions",{method:"POST",body:JSON.stringify({kind:t,players:e,...n})})}function b(t){return p(`/api/v1/sessions/${t}`)}function C(t){return p(`/api/v1/sessions/${t}/queries`)}function v(t,e,n){return p(`/api/v1/sessions/${t}/answers`,{method:"POST",body:JSON.stringify({query_id:e,labels:n})})}function S(t){return p(`/api/v1/sessions/${t}/result`)}const m=["#e07a5f","#81b29a","#f2cc8f","#6d99c9","#b085c9","#c9a185"];function o(t,e,n){const i=document.createElement(t);return e&&(i.className=e),n!==void 0&&(i.textContent=n),i}function $(){return{primary:null,extras:new Set,alsoMode:!1}}function u(t){const e=new Set(t.extras);return t.primary!==null&&e.add(t.primary),[...e].sort((n,i)=>n-i)}function x(t,e){const n={primary:t.primary,extras:new Set(t.extras),alsoMode:t.alsoMode};return t.alsoMode?(e===t.primary||(n.extras.has(e)?n.extras.delete(e):n.extras.add(e)),n):(n.primary=t.primary===e?null:e,n.extras.delete(e),n)}function E(t,e,n,i){const s=o("section","query-screen");s.dataset.queryId=t.query_id,s.appendChild(o("h2",void 0,`${t.participant}, which would you choose?`)),t.rendering.pieces?s.appendChild(k(t,e,n)):t.rendering.rooms&&s.appendChild(L(t,e,n));const r=o("label","also-row"),a=o("input");a.type="checkbox",a.checked=e.alsoMode,a.addEventListener("change",()=>n.onAlsoMode(a.checked)),r.appendChild(a),r.appendChild(o("span",void 0,"mark more options as also acceptable")),s.appendChild(r);const d=o("button","submit","Submit choice");if(d.disabled=u(e).length===0,d.addEventListener("click",()=>n.onSubmit()),s.appendChild(d),i){const c=o("p","error",i);s.appendChild(c)}return s}function k(t,e,n){const i=o("div","cake"),s=o("div","cake-bar"),r=new Set(u(e));for(const d of t.rendering.pieces){const c=o("button","segment");c.dataset.index=String(d.index),c.style.flexGrow=String(Math.max(d.end-d.start,0)),c.style.background=m[d.index%m.length],c.title=`piece ${d.index}: [${d.start}, ${d.end}]`,r.has(d.index)&&c.classList.add("selected"),d.end-d.start<=0&&c.classList.add("empty"),c.addEventListener("click",()=>n.onToggle(d.index)),s.appendChild(c)}i.appendChild(s);const a=o("div","cuts");for(const d of t.rendering.cuts??[])a.appendChild(o("span","cut",String(d)));return i.appendChild(a),i}function L(t,e,n){const i=o("div","rooms"),s=new Set(u(e));for(const r of t.rendering.rooms){const a=o("button","room-card");a.dataset.index=String(r.index),s.has(r.index)&&a.classList.add("selected"),a.appendChild(o("div","room-name",`room ${r.index}`)),a.appendChild(o("div","room-rent",String(r.rent))),r.free&&a.appendChild(o("span","badge-free","free")),a.addEventListener("click",()=>n.onToggle(r.index)),i.appendChild(a)}return i}function _(t){const e=o("div","progress"),n=t.resolution===null?"-":String(t.resolution);return e.appendChild(o("span","resolution",`resolution ${n}`)),e.appendChild(o("span","counts",`${t.answered} answered, ${t.pending_queries} waiting`)),e}function M(t,e){const n=o("section","result-screen");n.appendChild(o("h2",void 0,"Allocation"));const i=o("table","allocation");for(let r=0;r<t.permutation.length;r++){const a=o("tr");a.appendChild(o("td","who",e[r]??`player ${r}`));const d=t.permutation[r];if(t.kind==="cake"){const[c,h]=t.pieces[d];a.appendChild(o("td","what",`piece ${d}: [${c}, ${h}]`))}else a.appendChild(o("td","what",`room ${d} at rent ${t.rents[d]}`));i.appendChild(a)}n.appendChild(i);const s=o("p","witness",`witness x = [${t.x.join(", ")}]`);return n.appendChild(s),t.kind==="rent"&&n.appendChild(o("p","total",`total rent ${t.total_rent}`)),n.appendChild(o("p","envy-bound",`cell diameter ${t.cell_diameter} at resolution ${t.resolution}; envy is bounded by 2 x (max density) x this diameter`)),n}function O(t){const e=o("section","failed-screen");return e.appendChild(o("h2",void 0,"Session failed")),e.appendChild(o("p","error",t)),e}const P=1e3;class N{constructor(e){l(this,"sessionId",null);l(this,"participants",[]);l(this,"timer",null);l(this,"selections",new Map);l(this,"submitting",!1);l(this,"lastError",new Map);l(this,"done",!1);this.root=e}async start(e,n,i){const s=await w(e,n,i?{total_rent:i}:{});return this.sessionId=s.id,this.participants=s.participants,await this.tick(),this.timer=setInterval(()=>void this.tick(),P),s.id}stop(){this.timer!==null&&clearInterval(this.timer),this.timer=null}async tick(){if(this.sessionId===null||this.done)return;let e;try{e=await b(this.sessionId)}catch{return}if(e.status==="completed"){const i=await S(this.sessionId);this.done=!0,this.stop(),this.mount(M(i,this.participants));return}if(e.status==="failed"){this.done=!0,this.stop(),this.mount(O(e.error??"solver gave up"));return}const{queries:n}=await C(this.sessionId);this.renderPending(e,n)}renderPending(e,n){const i=document.createElement("div");i.appendChild(_(e));const s=n[0];if(!s)return;this.selections.has(s.query_id)||this.selections.set(s.query_id,$());const r=this.selections.get(s.query_id);i.appendChild(E(s,r,{onToggle:a=>{this.selections.set(s.query_id,x(r,a)),this.renderPending(e,n)},onAlsoMode:a=>{this.selections.set(s.query_id,{...r,alsoMode:a}),this.renderPending(e,n)},onSubmit:()=>void this.submit(s.query_id)},this.lastError.get(s.query_id))),this.mount(i)}async submit(e){if(this.sessionId===null||this.submitting)return;const n=this.selections.get(e),i=n?u(n):[];if(i.length!==0){this.submitting=!0;try{await v(this.sessionId,e,i),this.lastError.delete(e),this.selections.delete(e),await this.tick()}catch(s){s instanceof f&&s.status===409?(this.lastError.set(e,"already answered differently; refreshing"),this.selections.delete(e),await this.tick()):s instanceof f&&s.status===422?(this.lastError.set(e,`rejected: ${s.detail} - adjust your choice and retry`),await this.tick()):this.lastError.set(e,"submission failed; will retry on next poll")}finally{this.submitting=!1}}}mount(e){this.root.replaceChildren(e)}}function I(){const t=document.getElementById("setup-form"),e=document.getElementById("screen"),n=document.getElementById("session-banner");t.addEventListener("submit",i=>{i.preventDefault();const s=new FormData(t),r=s.get("kind")==="rent"?"rent":"cake",a=Number(s.get("players")??3),d=r==="rent"?Number(s.get("total_rent")??1):void 0;new N(e).start(r,a,d).then(h=>{n.textContent=`session ${h} (${r}, ${a} players)`,t.hidden=!0})})}I();
